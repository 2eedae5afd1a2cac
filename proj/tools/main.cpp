#include "commands.hpp"

int main(int argc, char** argv)
{
    return pflat::cli::run(argc, argv);
}
