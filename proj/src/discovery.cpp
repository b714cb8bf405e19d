#include <stdexcept>

#include "fairpath/discovery.hpp"

namespace fairpath {

std::string_view to_string(Algorithm algo) {
    switch (algo) {
        case Algorithm::Pc: return "pc";
        case Algorithm::Ges: return "ges";
        case Algorithm::Fci: return "fci";
        case Algorithm::Notears: return "notears";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
    const auto key = normalize_name(name);
    if (key == "pc") return Algorithm::Pc;
    if (key == "ges") return Algorithm::Ges;
    if (key == "fci") return Algorithm::Fci;
    if (key == "notears") return Algorithm::Notears;
    throw std::invalid_argument("unknown algorithm '" + std::string(name) + "' (expected pc, ges, fci or notears)");
}

MixedGraph discover(const Dataset& data, Algorithm algo, const DiscoveryConfig& cfg) {
    const Dataset input = cfg.standardize ? standardize(data) : data;
    switch (algo) {
        case Algorithm::Pc: return pc(input, cfg).graph;
        case Algorithm::Ges: return ges(input, cfg).graph;
        case Algorithm::Fci: return fci(input, cfg).graph;
        case Algorithm::Notears: {
            auto r = notears_linear(input, cfg);
            if (!r.converged)
                throw ConvergenceError("notears did not reach h <= " + std::to_string(cfg.notears.h_tol) +
                                       " (h = " + std::to_string(r.h) + " after " +
                                       std::to_string(r.dual_iterations) + " dual iterations)");
            return std::move(r.graph);
        }
    }
    throw std::logic_error("unhandled algorithm");
}

}  // namespace fairpath
