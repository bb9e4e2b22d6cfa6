#include "ttt/cli_app.hpp"

int main(int argc, char** argv) { return ttt::run_cli(argc, argv); }
