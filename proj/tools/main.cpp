#include "mach/cli.hpp"

int main(int argc, char** argv) {
    return mach::run_cli({argv + 1, argv + argc});
}
