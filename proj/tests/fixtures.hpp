#pragma once

#include "wavefront/front.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

inline std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(FIXTURE_DIR) + "/" + name);
    if (!in) throw std::runtime_error("missing fixture " + name);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline wavefront::FrontInstance fixture_front(const std::string& name) {
    return wavefront::parse_front(read_fixture(name + ".front"));
}

inline wavefront::LoopSpec fixture_loop(const std::string& name) {
    return wavefront::parse_loop(read_fixture(name + ".loop"));
}
