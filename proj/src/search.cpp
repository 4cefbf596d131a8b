#include "ajk/search.hpp"

#include "ajk/errors.hpp"
#include "ajk/parallel.hpp"
#include "ajk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

namespace ajk {

namespace {

void check_range(const Range& r, const char* name) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi)
        throw DomainError(std::string(name) + " range must be finite with lo <= hi");
}

}  // namespace

void SearchRegion::validate() const {
    if (p_set.empty()) throw DomainError("p set is empty");
    for (int p : p_set)
        if (p < 1) throw DomainError("p set entries must be >= 1");
    check_range(lambda, "lambda");
    check_range(alpha, "alpha");
    check_range(beta, "beta");
    if (lambda.lo < 0.0) throw DomainError("lambda range must be nonnegative");
    if (alpha.lo < 0.0 || alpha.hi > 1.0) throw DomainError("alpha range must lie in [0, 1]");
    if (beta.lo < 1.0) throw DomainError("beta range must start at 1 or above");
}

std::vector<Hyperparameters> random_candidates(const SearchRegion& region, int count, std::uint64_t seed) {
    region.validate();
    if (count < 1) throw DomainError("candidate count must be >= 1");

    std::vector<int> ps = region.p_set;
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    const bool continuous = region.lambda.lo < region.lambda.hi || region.alpha.lo < region.alpha.hi ||
                            region.beta.lo < region.beta.hi;
    if (!continuous && static_cast<int>(ps.size()) < count)
        throw CapacityError("search region has " + std::to_string(ps.size()) + " distinct points, " +
                            std::to_string(count) + " requested");

    using Key = std::tuple<int, double, double, double>;
    std::set<Key> seen;
    std::vector<Hyperparameters> out;
    out.reserve(static_cast<std::size_t>(count));
    Rng rng(seed);
    while (static_cast<int>(out.size()) < count) {
        Hyperparameters h;
        h.p = region.p_set[rng.below(region.p_set.size())];
        h.lambda = rng.uniform(region.lambda.lo, region.lambda.hi);
        h.alpha = rng.uniform(region.alpha.lo, region.alpha.hi);
        h.beta = rng.uniform(region.beta.lo, region.beta.hi);
        if (seen.emplace(h.p, h.lambda, h.alpha, h.beta).second) out.push_back(h);
    }
    return out;
}

SearchResult grid_search(const std::vector<Hyperparameters>& candidates, const CandidateEvaluator& evaluate,
                         int workers) {
    if (candidates.empty()) throw DomainError("no candidates to search");
    SearchResult result;
    result.trace.resize(candidates.size());
    parallel_for(candidates.size(), workers, [&](std::size_t k) {
        TraceEntry& entry = result.trace[k];
        entry.candidate = candidates[k];
        try {
            const ErrorEvaluation e = evaluate(candidates[k]);
            entry.error = e.value;
            entry.failed_patterns = e.failed_patterns;
            entry.ok = std::isfinite(e.value);
            if (!entry.ok) entry.message = "non-finite error";
        } catch (const Error& e) {
            entry.ok = false;
            entry.error = std::numeric_limits<double>::quiet_NaN();
            entry.message = e.what();
        }
    });

    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < result.trace.size(); ++k) {
        const TraceEntry& entry = result.trace[k];
        if (entry.ok && (!best || entry.error < result.trace[*best].error)) best = k;
    }
    if (!best) {
        throw NumericalError("every candidate failed; first failure: " + result.trace.front().message);
    }
    result.best = result.trace[*best].candidate;
    result.best_error = result.trace[*best].error;
    return result;
}

SearchResult grid_search(const TimeSeriesDataset& data, const std::vector<Hyperparameters>& candidates,
                         const ErrorSpec& spec, const EcmConfig& config, int workers) {
    std::optional<SubsampleFamily> family;
    std::optional<int> resolved_d;
    if (const auto* jk = std::get_if<JackknifeEstimator>(&spec.kind)) {
        family = make_family(jk->family, data.num_series(), data.num_periods());
        if (const auto* art = std::get_if<ArtificialFamily>(&jk->family))
            resolved_d = resolve_d(*art, data.num_series(), data.num_periods());
    }
    const SubsampleFamily* shared = family ? &*family : nullptr;
    // Candidates are the parallel unit; patterns run serially inside each.
    SearchResult result = grid_search(
        candidates,
        [&](const Hyperparameters& h) { return evaluate_error(data, h, spec, config, shared, 1); },
        workers);
    result.resolved_d = resolved_d;
    return result;
}

SearchResult select_hyperparameters(const TimeSeriesDataset& data, const SearchRegion& region,
                                    const ErrorSpec& spec, int count, std::uint64_t seed,
                                    const EcmConfig& config, int workers) {
    ErrorSpec seeded = spec;
    if (auto* jk = std::get_if<JackknifeEstimator>(&seeded.kind)) {
        if (auto* art = std::get_if<ArtificialFamily>(&jk->family))
            art->seed = derive_seed(seed, "artificial_family");
    }
    const std::vector<Hyperparameters> candidates =
        random_candidates(region, count, derive_seed(seed, "candidates"));
    SearchResult result = grid_search(data, candidates, seeded, config, workers);
    result.seed = seed;
    return result;
}

}  // namespace ajk
