#include <iostream>

#include "sftlab/app.hpp"

int main(int argc, char** argv) { return sftlab::run(argc, argv, std::cout, std::cerr); }
