#pragma once

#include <chrono>
#include <optional>
#include <string>

#include "causalsheet/dataset.hpp"
#include "causalsheet/graph.hpp"
#include "causalsheet/score.hpp"
#include "json.hpp"

namespace causalsheet {

enum class Algorithm { Pc, Ges, Mmhc };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct LearnerConfig {
    Algorithm algorithm = Algorithm::Ges;
    ScoreConfig score{};
    double significance = 0.05;
    int max_conditioning_size = 3;
    int max_parents = 8;
    std::optional<double> time_budget_seconds;

    nlohmann::json to_json() const;
    static LearnerConfig from_json(const nlohmann::json& j);
    bool operator==(const LearnerConfig&) const = default;
};

// Soft deadline checked at loop boundaries; throws TimeoutError when expired.
class Deadline {
public:
    explicit Deadline(std::optional<double> budget_seconds);
    void check(const char* where) const;

private:
    std::optional<std::chrono::steady_clock::time_point> expiry_;
};

Cpdag learn_pc(const Dataset& data, const LearnerConfig& config);
Cpdag learn_ges(const Dataset& data, const LearnerConfig& config);
Cpdag learn_mmhc(const Dataset& data, const LearnerConfig& config);
Cpdag learn(const Dataset& data, const LearnerConfig& config);

}  // namespace causalsheet
