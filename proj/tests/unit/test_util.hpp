#pragma once

#include <string>

#include "railsched/instance.hpp"

#ifndef RAILSCHED_FIXTURES
#define RAILSCHED_FIXTURES "tests/fixtures"
#endif

inline std::string fixture_path(const std::string& name) { return std::string(RAILSCHED_FIXTURES) + "/" + name; }

inline railsched::Instance load_fixture(const std::string& name) { return railsched::read_instance_file(fixture_path(name)); }

inline railsched::Symbol S(const char* s) { return railsched::Symbol(s); }
inline railsched::Edge E(int a, int b) { return {railsched::Symbol(a), railsched::Symbol(b)}; }
