#include "qclip/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return qclip::cli::run_command(std::move(args));
}
