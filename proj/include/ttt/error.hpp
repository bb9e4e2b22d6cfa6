#pragma once

#include <stdexcept>
#include <string>

namespace ttt {

// Data-shaped problems: malformed files, invariant violations, misaligned
// corpora. The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public DataError {
public:
    ParseError(const std::string& msg, long line)
        : DataError("line " + std::to_string(line) + ": " + msg), line_number(line) {}
    long line_number;
};

class ValidationError : public DataError {
public:
    explicit ValidationError(const std::string& msg) : DataError(msg) {}
};

class AlignmentError : public DataError {
public:
    explicit AlignmentError(const std::string& msg) : DataError(msg) {}
};

// Learner training/prediction failures, including external subprocess
// errors (message carries captured diagnostics). CLI exit code 3.
class LearnerError : public std::runtime_error {
public:
    explicit LearnerError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ttt
