#pragma once

#include <cstdint>

#include "railsched/instance.hpp"

namespace railsched {

struct GenParams {
    int trains = 3;
    int nodes = 8;
    int multi_resources = 2;  // junction resources spanning several edges
    int connections = 1;
    bool open_windows = false;  // no latest times
    std::uint64_t seed = 1;
};

/// Random small instance that passes validate_instance. Deterministic in the seed.
Instance generate_instance(const GenParams& params);

}  // namespace railsched
