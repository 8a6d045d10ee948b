#include "reach_venn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace reach_venn {
namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double parse_number(std::string_view text) {
    try {
        std::size_t used = 0;
        const std::string s(text);
        const double v = std::stod(s, &used);
        if (used != s.size()) throw ReachError("");
        return v;
    } catch (const std::exception&) {
        throw ReachError("bad number in generator spec: '" + std::string(text) + "'");
    }
}

double sample_beta(double a, double b, Engine& engine) {
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    const double x = ga(engine);
    const double y = gb(engine);
    return x + y > 0.0 ? x / (x + y) : 0.5;
}

std::vector<double> ci_groups_regions(const CiGroupsSpec& spec, int p, Engine& engine) {
    if (spec.num_groups < 1) throw ReachError("num_groups must be at least 1");
    if (!spec.fixed_reach && !(spec.beta_a > 0.0 && spec.beta_b > 0.0)) throw ReachError("beta parameters must be positive");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> weights(static_cast<std::size_t>(spec.num_groups));
    for (double& w : weights) w = unif(engine);
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) std::fill(weights.begin(), weights.end(), 1.0 / spec.num_groups), total = 1.0;
    for (double& w : weights) w /= total;

    const std::size_t regions = region_count(p);
    std::vector<double> out(regions, 0.0);
    std::vector<double> r(static_cast<std::size_t>(p));
    for (const double w : weights) {
        for (double& ri : r) ri = spec.fixed_reach ? *spec.fixed_reach : sample_beta(spec.beta_a, spec.beta_b, engine);
        for (std::size_t m = 0; m < regions; ++m) {
            double prob = w;
            for (int i = 0; i < p; ++i) prob *= ((m >> i) & 1U) ? r[static_cast<std::size_t>(i)] : 1.0 - r[static_cast<std::size_t>(i)];
            out[m] += prob;
        }
    }
    return out;
}

std::vector<double> dirichlet_regions(const DirichletSpec& spec, int p, Engine& engine) {
    if (!(spec.alpha > 0.0)) throw ReachError("dirichlet alpha must be positive");
    std::gamma_distribution<double> gamma(spec.alpha, 1.0);
    std::vector<double> out(region_count(p));
    double total = 0.0;
    for (double& v : out) {
        v = gamma(engine);
        total += v;
    }
    if (total <= 0.0) {
        std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
        return out;
    }
    for (double& v : out) v /= total;
    return out;
}

}  // namespace

GeneratorSpec GeneratorSpec::parse(std::string_view text, int num_bgs, double universe_size, std::uint64_t seed) {
    GeneratorSpec spec;
    spec.num_bgs = num_bgs;
    spec.universe_size = universe_size;
    spec.seed = seed;
    const auto parts = split(text, ':');
    const std::string_view kind = parts.front();
    if (kind == "ci") {
        CiGroupsSpec ci;
        if (parts.size() == 4) {
            const double g = parse_number(parts[1]);
            if (g < 1 || g != std::floor(g)) throw ReachError("ci group count must be a positive integer");
            ci.num_groups = static_cast<int>(g);
            ci.beta_a = parse_number(parts[2]);
            ci.beta_b = parse_number(parts[3]);
        } else if (parts.size() != 1) {
            throw ReachError("ci generator takes 'ci' or 'ci:G:a:b'");
        }
        spec.kind = ci;
    } else if (kind == "independent") {
        if (parts.size() != 2) throw ReachError("independent generator takes 'independent:r'");
        CiGroupsSpec ci;
        ci.num_groups = 1;
        ci.fixed_reach = parse_number(parts[1]);
        if (*ci.fixed_reach < 0.0 || *ci.fixed_reach > 1.0) throw ReachError("independent reach must be in [0, 1]");
        spec.kind = ci;
    } else if (kind == "dirichlet") {
        if (parts.size() != 2) throw ReachError("dirichlet generator takes 'dirichlet:alpha'");
        spec.kind = DirichletSpec{parse_number(parts[1])};
    } else {
        throw ReachError("unknown generator '" + std::string(kind) + "'");
    }
    return spec;
}

std::string GeneratorSpec::describe() const {
    std::ostringstream out;
    if (const auto* ci = std::get_if<CiGroupsSpec>(&kind)) {
        if (ci->fixed_reach) {
            out << "ci(" << ci->num_groups << " groups, r=" << *ci->fixed_reach << ")";
        } else {
            out << "ci(" << ci->num_groups << " groups, Beta(" << ci->beta_a << "," << ci->beta_b << "))";
        }
    } else {
        out << "dirichlet(alpha=" << std::get<DirichletSpec>(kind).alpha << ")";
    }
    return out.str();
}

Engine replicate_engine(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t s = seed ^ index;
    std::seed_seq seq{static_cast<std::uint32_t>(s & 0xffffffffU), static_cast<std::uint32_t>(s >> 32)};
    return Engine(seq);
}

GroundTruth generate(const GeneratorSpec& spec) {
    Engine engine = replicate_engine(spec.seed);
    return generate(spec, engine);
}

GroundTruth generate(const GeneratorSpec& spec, Engine& engine) {
    check_num_bgs(spec.num_bgs);
    if (!(spec.universe_size > 0.0) || !std::isfinite(spec.universe_size)) throw ReachError("universe size must be positive");
    std::vector<double> proportions = std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, CiGroupsSpec>) {
                return ci_groups_regions(k, spec.num_bgs, engine);
            } else {
                return dirichlet_regions(k, spec.num_bgs, engine);
            }
        },
        spec.kind);
    for (double& v : proportions) v *= spec.universe_size;
    return {RegionAllocation(spec.num_bgs, std::move(proportions)), spec};
}

double true_reach(const GroundTruth& truth, SubsetMask subset) {
    return subset_reach_from_allocation(subset, truth.allocation);
}

ReachDataset dataset_from_truth(const GroundTruth& truth, std::span<const SubsetMask> masks) {
    std::vector<ReachObservation> obs;
    const double u = truth.generator.universe_size;
    for (SubsetMask m : masks) obs.push_back({m, std::min(true_reach(truth, m), u)});
    return {truth.generator.num_bgs, u, std::move(obs)};
}

std::vector<ReachObservation> add_measurement_noise(std::vector<ReachObservation> observations, Engine& engine) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& obs : observations) {
        if (obs.reach < 0.0) throw ReachError("noise needs non-negative reaches");
        const double z = normal(engine);
        obs.reach = std::max(0.0, obs.reach + kNoiseRelativeSigma * obs.reach * z);
    }
    return observations;
}

std::vector<ReachObservation> add_measurement_noise(std::vector<ReachObservation> observations, std::uint64_t seed) {
    Engine engine = replicate_engine(seed);
    return add_measurement_noise(std::move(observations), engine);
}

}  // namespace reach_venn
