#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace appwatch::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,     // I/O and anything unclassified
    kConfig = 2,      // bad flags or configuration values
    kParse = 3,       // malformed trace, ARFF, rule or config text
    kSchema = 4,      // well-formed input with the wrong shape
    kSinkFailure = 5  // outputs written but a report sink failed
};

/// Runs one command line (`args` excludes the program name). Normal output
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace appwatch::cli
