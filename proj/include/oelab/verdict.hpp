#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace oelab {

/// Outcome of a verification sweep. A failing verdict carries at least one
/// concrete witness; `info` holds coverage and measured quantities.
struct Verdict {
    std::string check;
    bool pass = true;
    std::vector<nlohmann::json> witnesses;
    nlohmann::json info = nlohmann::json::object();

    explicit Verdict(std::string name = {}) : check(std::move(name)) {}

    void fail(nlohmann::json witness)
    {
        pass = false;
        witnesses.push_back(std::move(witness));
    }

    // Keeps reports small when a checker finds many violations.
    bool saturated(std::size_t limit = 8) const { return witnesses.size() >= limit; }
};

inline void to_json(nlohmann::json& j, const Verdict& v)
{
    j = nlohmann::json{{"check", v.check}, {"pass", v.pass}, {"witnesses", v.witnesses}, {"info", v.info}};
}

} // namespace oelab
