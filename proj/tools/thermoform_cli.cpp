#include <thermoform/cli.hpp>

int main(int argc, char** argv) { return thermoform::cli::run(argc, argv); }
