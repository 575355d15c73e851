#include "pbropt_cli.hpp"

int main(int argc, char** argv)
{
    return pbr::cli::run(argc, argv);
}
