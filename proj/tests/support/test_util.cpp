#include "support/test_util.hpp"

#include <cstdlib>

#ifdef __unix__
#include <sys/wait.h>
#endif

namespace ttt::testutil {

int run_command(const std::string& command, const std::string& capture_path) {
    std::string full = command;
    if (!capture_path.empty()) full += " > " + capture_path + " 2>&1";
    const int rc = std::system(full.c_str());
#ifdef __unix__
    if (rc == -1) return -1;
    if (WIFEXITED(rc)) return WEXITSTATUS(rc);
    return -1;
#else
    return rc;
#endif
}

}  // namespace ttt::testutil
