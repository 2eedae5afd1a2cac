#pragma once

namespace pflat::cli {

enum ExitCode
{
    kOk = 0,
    kUsage = 1,
    kValidation = 2,
    kNonConvergence = 3,
};

int run(int argc, char** argv);

} // namespace pflat::cli
