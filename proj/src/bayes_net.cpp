#include "causalsheet/bayes_net.hpp"

#include <cmath>
#include <stdexcept>

#include "causalsheet/inference.hpp"

namespace causalsheet {

ParentIndexer::ParentIndexer(std::vector<int> parent_vars, const std::vector<int>& cardinalities)
    : parents(std::move(parent_vars)), strides(parents.size()) {
    for (std::size_t i = parents.size(); i-- > 0;) {
        strides[i] = config_count;
        config_count *= static_cast<std::size_t>(cardinalities.at(parents[i]));
    }
}

void DiscreteBayesNet::validate() const {
    const int n = node_count();
    if (static_cast<int>(cardinalities.size()) != n || static_cast<int>(cpts.size()) != n)
        throw std::invalid_argument("DiscreteBayesNet: field sizes disagree");
    for (int v = 0; v < n; ++v) {
        if (cardinalities[v] < 2) throw std::invalid_argument("DiscreteBayesNet: cardinality < 2");
        const Cpt& cpt = cpts[v];
        if (cpt.cardinality != cardinalities[v])
            throw std::invalid_argument("DiscreteBayesNet: cpt cardinality mismatch");
        std::vector<int> expected(dag.parents(v).begin(), dag.parents(v).end());
        if (cpt.parents != expected)
            throw std::invalid_argument("DiscreteBayesNet: cpt parents disagree with dag");
        std::size_t q = 1;
        for (int p : cpt.parents) q *= static_cast<std::size_t>(cardinalities[p]);
        if (cpt.table.size() != q * cpt.cardinality)
            throw std::invalid_argument("DiscreteBayesNet: cpt table size mismatch");
        for (std::size_t j = 0; j < q; ++j) {
            double sum = 0.0;
            for (int k = 0; k < cpt.cardinality; ++k) {
                double p = cpt.row(j)[k];
                if (p < 0.0) throw std::invalid_argument("DiscreteBayesNet: negative probability");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-9)
                throw std::invalid_argument("DiscreteBayesNet: cpt row does not sum to 1");
        }
    }
}

std::vector<std::vector<double>> DiscreteBayesNet::marginals() const {
    std::vector<std::vector<double>> out(node_count());
    for (int v = 0; v < node_count(); ++v) out[v] = exact_marginal(*this, v);
    return out;
}

nlohmann::json DiscreteBayesNet::to_json() const {
    nlohmann::json cpt_arr = nlohmann::json::array();
    for (const Cpt& cpt : cpts) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t j = 0; j < cpt.row_count(); ++j) {
            nlohmann::json row = nlohmann::json::array();
            for (int k = 0; k < cpt.cardinality; ++k) row.push_back(cpt.row(j)[k]);
            rows.push_back(std::move(row));
        }
        cpt_arr.push_back(std::move(rows));
    }
    return {{"graph", dag.to_json()}, {"cardinalities", cardinalities}, {"cpts", cpt_arr}};
}

DiscreteBayesNet DiscreteBayesNet::from_json(const nlohmann::json& j) {
    DiscreteBayesNet bn;
    bn.dag = Dag::from_json(j.at("graph"));
    bn.cardinalities = j.at("cardinalities").get<std::vector<int>>();
    const auto& cpt_arr = j.at("cpts");
    for (int v = 0; v < bn.node_count(); ++v) {
        Cpt cpt;
        cpt.parents.assign(bn.dag.parents(v).begin(), bn.dag.parents(v).end());
        cpt.cardinality = bn.cardinalities[v];
        for (const auto& row : cpt_arr.at(v))
            for (const auto& p : row) cpt.table.push_back(p.get<double>());
        bn.cpts.push_back(std::move(cpt));
    }
    bn.validate();
    return bn;
}

}  // namespace causalsheet
