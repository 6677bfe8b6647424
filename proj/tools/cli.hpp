#pragma once

namespace qsn::cli {

enum ExitCode { kOk = 0, kUsage = 2, kFailureQuota = 3, kIo = 4 };

/// Entry point of the `qsn` command. Returns the process exit code.
int run(int argc, char** argv);

}  // namespace qsn::cli
