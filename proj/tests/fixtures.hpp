#pragma once

#include "sigref/game_json.hpp"

#include <cstdlib>
#include <string>

inline std::string fixture_dir() {
    if (const char* env = std::getenv("SIGREF_FIXTURES")) return env;
    return SIGREF_FIXTURE_DIR;
}

inline std::string fixture_path(const std::string& name) { return fixture_dir() + "/" + name; }

inline sigref::Game load_game_fixture(const std::string& name) {
    return std::get<sigref::Game>(sigref::parse_game_spec_file(fixture_path(name)));
}

inline sigref::SpenceSpec load_spence_fixture(const std::string& name) {
    return std::get<sigref::SpenceSpec>(sigref::parse_game_spec_file(fixture_path(name)));
}
