#include "aefs/cli.hpp"

int main(int argc, char** argv) {
    return aefs::cli_main(argc, argv);
}
