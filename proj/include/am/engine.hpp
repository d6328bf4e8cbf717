#ifndef AM_ENGINE_HPP
#define AM_ENGINE_HPP

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "am/bits.hpp"
#include "am/dataset.hpp"
#include "am/numeric.hpp"

namespace am {

/// An n-bit supracontext mask: bit = 1 means the feature must match the
/// given context, 0 means it is ignored. Packed like DiffVector, so the
/// integer reads the same as the paper-style bit string.
using SupraMask = std::uint64_t;

/// The 2^n masks in report order: descending popcount, ties broken by
/// descending numeric value (111, 110, 101, 011, 100, 010, 001, 000 for n=3).
inline std::vector<SupraMask> canonicalMasks(std::size_t n) {
    std::vector<SupraMask> masks(std::size_t(1) << n);
    for (std::size_t i = 0; i < masks.size(); ++i) masks[i] = i;
    std::sort(masks.begin(), masks.end(), [](SupraMask a, SupraMask b) {
        int pa = std::popcount(a), pb = std::popcount(b);
        if (pa != pb) return pa > pb;
        return a > b;
    });
    return masks;
}

/// Bit j = 1 iff every feature the mask requires matches for item j,
/// i.e. (mask AND diffs[j]) = 0.
inline Bits containedItems(SupraMask mask, const std::vector<DiffVector>& diffs) {
    Bits c(diffs.size());
    for (std::size_t j = 0; j < diffs.size(); ++j)
        c.set(j, (mask & diffs[j]) == 0);
    return c;
}

/// Number of ordered pairs of items with differing outcomes:
/// n^2 - sum(n_i^2) where n = sum(n_i).
inline std::uint64_t disagreements(const std::vector<std::uint64_t>& countsByOutcome) {
    std::uint64_t total = 0, sumSquares = 0;
    for (std::uint64_t c : countsByOutcome) {
        total += c;
        sumSquares += c * c;
    }
    return total * total - sumSquares;
}

/// Q = 1 - sum((n_i/n)^2), the chance two randomly chosen items disagree.
/// Empty supracontexts have no defined uncertainty.
inline std::optional<Rational> quadraticUncertainty(
    const std::vector<std::uint64_t>& countsByOutcome) {
    std::uint64_t total = 0;
    for (std::uint64_t c : countsByOutcome) total += c;
    if (total == 0) return std::nullopt;
    return Rational(disagreements(countsByOutcome), total * total);
}

/// Full analysis of one supracontext against a given context.
struct SupracontextAnalysis {
    SupraMask mask = 0;
    Bits contained;                             // one bit per data item
    std::vector<std::uint64_t> countsByOutcome; // indexed by dataset outcome
    std::uint64_t total = 0;
    std::set<DiffVector> subcontextClasses;
    bool pluralSubcontexts = false;
    bool pluralOutcomes = false;
    bool homogeneous = true;
    std::uint64_t disagreementCount = 0;
    std::uint64_t partitionDisagreementCount = 0;
};

inline SupracontextAnalysis analyzeMask(SupraMask mask,
                                        const std::vector<DiffVector>& diffs,
                                        const std::vector<std::size_t>& outcomeIdx,
                                        std::size_t numOutcomes) {
    SupracontextAnalysis a;
    a.mask = mask;
    a.contained = containedItems(mask, diffs);
    a.countsByOutcome.assign(numOutcomes, 0);

    // Group contained items by their full difference vector (subcontext class).
    std::map<DiffVector, std::vector<std::uint64_t>> groups;
    std::set<std::size_t> outcomesSeen;
    for (std::size_t j = 0; j < diffs.size(); ++j) {
        if (!a.contained.test(j)) continue;
        ++a.total;
        ++a.countsByOutcome[outcomeIdx[j]];
        outcomesSeen.insert(outcomeIdx[j]);
        a.subcontextClasses.insert(diffs[j]);
        auto& g = groups[diffs[j]];
        g.resize(numOutcomes, 0);
        ++g[outcomeIdx[j]];
    }

    a.disagreementCount = disagreements(a.countsByOutcome);
    a.partitionDisagreementCount = 0;
    for (const auto& [diff, counts] : groups)
        a.partitionDisagreementCount += disagreements(counts);

    a.pluralSubcontexts = a.subcontextClasses.size() >= 2;
    a.pluralOutcomes = outcomesSeen.size() >= 2;
    a.homogeneous = !(a.pluralSubcontexts && a.pluralOutcomes);

    // The disagreement route and the plurality route must always agree.
    assert(a.homogeneous ==
           (a.disagreementCount == a.partitionDisagreementCount));
    return a;
}

inline std::uint64_t partitionDisagreements(SupraMask mask,
                                            const std::vector<DiffVector>& diffs,
                                            const std::vector<std::size_t>& outcomeIdx,
                                            std::size_t numOutcomes) {
    return analyzeMask(mask, diffs, outcomeIdx, numOutcomes).partitionDisagreementCount;
}

inline bool homogeneityByDisagreement(SupraMask mask,
                                      const std::vector<DiffVector>& diffs,
                                      const std::vector<std::size_t>& outcomeIdx,
                                      std::size_t numOutcomes) {
    auto a = analyzeMask(mask, diffs, outcomeIdx, numOutcomes);
    return a.disagreementCount == a.partitionDisagreementCount;
}

struct PluralityResult {
    bool pluralSubcontexts;
    bool pluralOutcomes;
    bool homogeneous;
};

inline PluralityResult homogeneityByPlurality(SupraMask mask,
                                              const std::vector<DiffVector>& diffs,
                                              const std::vector<std::size_t>& outcomeIdx,
                                              std::size_t numOutcomes) {
    auto a = analyzeMask(mask, diffs, outcomeIdx, numOutcomes);
    return {a.pluralSubcontexts, a.pluralOutcomes,
            !(a.pluralSubcontexts && a.pluralOutcomes)};
}

inline std::vector<std::size_t> outcomeIndices(const Dataset& ds) {
    std::vector<std::size_t> idx;
    idx.reserve(ds.items.size());
    for (const auto& item : ds.items) idx.push_back(ds.outcomeIndex(item.outcome));
    return idx;
}

constexpr std::size_t kDefaultArityCap = 24;

/// One analysis per mask, in canonical report order.
inline std::vector<SupracontextAnalysis> analyzeAll(
    const Dataset& ds, const GivenContext& given,
    std::size_t arityCap = kDefaultArityCap) {
    checkArity(given.features.size(), ds.arity);
    if (ds.arity > arityCap)
        throw std::length_error("arity " + std::to_string(ds.arity) +
                                " exceeds the 2^n enumeration cap of " +
                                std::to_string(arityCap));
    auto diffs = differenceVectors(ds, given);
    auto outIdx = outcomeIndices(ds);
    std::vector<SupracontextAnalysis> result;
    result.reserve(std::size_t(1) << ds.arity);
    for (SupraMask mask : canonicalMasks(ds.arity))
        result.push_back(analyzeMask(mask, diffs, outIdx, ds.outcomes.size()));
    return result;
}

/// Pointers to outcome w = total * n_w for a homogeneous supracontext;
/// heterogeneous supracontexts contribute nothing.
inline std::vector<BigInt> pointerCounts(const SupracontextAnalysis& a) {
    std::vector<BigInt> p(a.countsByOutcome.size(), 0);
    if (!a.homogeneous) return p;
    for (std::size_t w = 0; w < p.size(); ++w)
        p[w] = BigInt(a.total) * a.countsByOutcome[w];
    return p;
}

struct Prediction {
    std::vector<BigInt> pointersByOutcome;  // indexed by dataset outcome
    BigInt totalPointers = 0;
    std::vector<Rational> probabilities;    // defined only when hasPrediction
    std::vector<SupracontextAnalysis> perSupracontext;
    bool hasPrediction = false;
};

/// Supracontext selection predicates; Homogeneity is the analogical default.
struct SelectionProperty {
    enum class Kind {
        Homogeneity,
        NonpluralOutcomes,
        NonpluralSubcontexts,
        Occupied,
        Singleton,
        DistanceOne
    };
    Kind kind = Kind::Homogeneity;

    bool matches(const SupracontextAnalysis& a, std::size_t arity) const {
        switch (kind) {
            case Kind::Homogeneity: return a.homogeneous;
            case Kind::NonpluralOutcomes: return !a.pluralOutcomes;
            case Kind::NonpluralSubcontexts: return !a.pluralSubcontexts;
            case Kind::Occupied: return a.total > 0;
            case Kind::Singleton:
                return a.total == 1 && a.subcontextClasses.size() == 1;
            case Kind::DistanceOne:
                return std::size_t(std::popcount(a.mask)) == arity - 1;
        }
        return false;
    }
};

/// Prediction with pointers flowing only through supracontexts satisfying
/// the property.
inline Prediction predictWithProperty(const Dataset& ds, const GivenContext& given,
                                      SelectionProperty prop,
                                      std::size_t arityCap = kDefaultArityCap) {
    Prediction p;
    p.perSupracontext = analyzeAll(ds, given, arityCap);
    p.pointersByOutcome.assign(ds.outcomes.size(), 0);
    for (const auto& a : p.perSupracontext) {
        if (!prop.matches(a, ds.arity)) continue;
        for (std::size_t w = 0; w < ds.outcomes.size(); ++w)
            p.pointersByOutcome[w] += BigInt(a.total) * a.countsByOutcome[w];
    }
    for (const auto& c : p.pointersByOutcome) p.totalPointers += c;
    if (p.totalPointers > 0) {
        p.hasPrediction = true;
        for (const auto& c : p.pointersByOutcome)
            p.probabilities.emplace_back(Rational(c) / Rational(p.totalPointers));
    }
    return p;
}

inline Prediction predict(const Dataset& ds, const GivenContext& given,
                          std::size_t arityCap = kDefaultArityCap) {
    return predictWithProperty(ds, given, SelectionProperty{}, arityCap);
}

/// One "true rule" per occupied homogeneous supracontext.
struct Rule {
    SupraMask mask = 0;
    std::vector<Rational> outcomeDistribution;
    std::uint64_t frequency = 0;
    Rational ruleProbability;  // frequency^2 / sum of squared frequencies
};

struct RulePrediction {
    std::vector<Rule> rules;
    std::vector<Rational> distribution;
    bool hasPrediction = false;
};

/// Two-stage view: pick a rule with probability proportional to its
/// frequency squared, then an outcome from the rule's distribution. Yields
/// exactly the same distribution as predict().
inline RulePrediction predictRuleEquivalent(const Dataset& ds, const GivenContext& given,
                                            std::size_t arityCap = kDefaultArityCap) {
    RulePrediction rp;
    auto analyses = analyzeAll(ds, given, arityCap);
    BigInt sumSquares = 0;
    for (const auto& a : analyses) {
        if (!a.homogeneous || a.total == 0) continue;
        Rule r;
        r.mask = a.mask;
        r.frequency = a.total;
        for (std::uint64_t c : a.countsByOutcome)
            r.outcomeDistribution.emplace_back(Rational(c, a.total));
        rp.rules.push_back(std::move(r));
        sumSquares += BigInt(a.total) * a.total;
    }
    if (sumSquares == 0) return rp;
    rp.hasPrediction = true;
    rp.distribution.assign(ds.outcomes.size(), Rational(0));
    for (auto& r : rp.rules) {
        r.ruleProbability = Rational(BigInt(r.frequency) * r.frequency) / Rational(sumSquares);
        for (std::size_t w = 0; w < ds.outcomes.size(); ++w)
            rp.distribution[w] += r.ruleProbability * r.outcomeDistribution[w];
    }
    return rp;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

struct ImperfectMemoryResult {
    // One entry per trial; nullopt marks a NoPrediction trial.
    std::vector<std::optional<std::vector<Rational>>> trialDistributions;
    std::size_t noPredictionTrials = 0;
    std::vector<Rational> meanDistribution;  // over predicting trials only
    bool hasMean = false;
};

/// Each trial retains every data item independently with probability
/// retainProb, then predicts from the survivors. Trials use derived seeds,
/// so results are reproducible regardless of execution order.
inline ImperfectMemoryResult predictImperfectMemory(
    const Dataset& ds, const GivenContext& given, const Rational& retainProb,
    std::size_t trials, std::uint64_t seed,
    std::size_t arityCap = kDefaultArityCap) {
    if (retainProb < 0 || retainProb > 1)
        throw std::invalid_argument("retainProb must be in [0, 1]");
    if (trials == 0) throw std::invalid_argument("trials must be positive");

    BigInt numBig = boost::multiprecision::numerator(retainProb);
    BigInt denBig = boost::multiprecision::denominator(retainProb);
    if (denBig > BigInt(std::numeric_limits<std::uint64_t>::max()))
        throw std::invalid_argument("retainProb denominator too large");
    auto num = numBig.convert_to<std::uint64_t>();
    auto den = denBig.convert_to<std::uint64_t>();

    ImperfectMemoryResult result;
    result.trialDistributions.reserve(trials);
    std::vector<Rational> sum(ds.outcomes.size(), Rational(0));

    for (std::size_t t = 0; t < trials; ++t) {
        std::mt19937_64 rng(detail::splitmix64(seed + t));
        std::uniform_int_distribution<std::uint64_t> dist(0, den - 1);
        Dataset survivors;
        survivors.arity = ds.arity;
        survivors.outcomes = ds.outcomes;
        for (const auto& item : ds.items)
            if (dist(rng) < num) survivors.items.push_back(item);

        if (survivors.items.empty()) {
            result.trialDistributions.emplace_back(std::nullopt);
            ++result.noPredictionTrials;
            continue;
        }
        Prediction p = predict(survivors, given, arityCap);
        if (!p.hasPrediction) {
            result.trialDistributions.emplace_back(std::nullopt);
            ++result.noPredictionTrials;
            continue;
        }
        for (std::size_t w = 0; w < sum.size(); ++w) sum[w] += p.probabilities[w];
        result.trialDistributions.emplace_back(std::move(p.probabilities));
    }

    std::size_t predicting = trials - result.noPredictionTrials;
    if (predicting > 0) {
        result.hasMean = true;
        for (auto& s : sum)
            result.meanDistribution.push_back(s / Rational(predicting));
    }
    return result;
}

} // namespace am

#endif
