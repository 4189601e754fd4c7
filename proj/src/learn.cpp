#include "causalsheet/learn.hpp"

#include <stdexcept>

#include "causalsheet/errors.hpp"

namespace causalsheet {

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Pc: return "pc";
        case Algorithm::Ges: return "ges";
        case Algorithm::Mmhc: return "mmhc";
    }
    throw std::invalid_argument("unknown Algorithm");
}

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "pc") return Algorithm::Pc;
    if (s == "ges") return Algorithm::Ges;
    if (s == "mmhc") return Algorithm::Mmhc;
    throw std::invalid_argument("unknown algorithm: " + s);
}

nlohmann::json LearnerConfig::to_json() const {
    nlohmann::json j{{"algorithm", to_string(algorithm)},
                     {"ess", score.equivalent_sample_size},
                     {"significance", significance},
                     {"max_conditioning_size", max_conditioning_size},
                     {"max_parents", max_parents}};
    if (time_budget_seconds)
        j["time_budget_seconds"] = *time_budget_seconds;
    else
        j["time_budget_seconds"] = nullptr;
    return j;
}

LearnerConfig LearnerConfig::from_json(const nlohmann::json& j) {
    LearnerConfig c;
    c.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    c.score.equivalent_sample_size = j.value("ess", 1.0);
    c.significance = j.value("significance", 0.05);
    c.max_conditioning_size = j.value("max_conditioning_size", 3);
    c.max_parents = j.value("max_parents", 8);
    if (j.contains("time_budget_seconds") && !j.at("time_budget_seconds").is_null())
        c.time_budget_seconds = j.at("time_budget_seconds").get<double>();
    return c;
}

Deadline::Deadline(std::optional<double> budget_seconds) {
    if (budget_seconds) {
        if (!(*budget_seconds > 0.0))
            throw std::invalid_argument("Deadline: budget must be positive");
        expiry_ = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(*budget_seconds));
    }
}

void Deadline::check(const char* where) const {
    if (expiry_ && std::chrono::steady_clock::now() > *expiry_)
        throw TimeoutError(std::string("time budget exceeded in ") + where);
}

Cpdag learn(const Dataset& data, const LearnerConfig& config) {
    switch (config.algorithm) {
        case Algorithm::Pc: return learn_pc(data, config);
        case Algorithm::Ges: return learn_ges(data, config);
        case Algorithm::Mmhc: return learn_mmhc(data, config);
    }
    throw std::invalid_argument("unknown Algorithm");
}

}  // namespace causalsheet
