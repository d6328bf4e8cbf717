#ifndef AM_REPORT_HPP
#define AM_REPORT_HPP

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "am/circuit.hpp"
#include "am/dataset.hpp"
#include "am/engine.hpp"
#include "am/numeric.hpp"

namespace am {

/// One supracontext row of a prediction report.
struct SupraRow {
    SupraMask mask = 0;
    Bits contained;
    bool homogeneous = true;
    std::vector<BigInt> pointers;  // indexed by dataset outcome
};

/// Per-test-item result, engine-agnostic.
struct ItemResult {
    GivenContext given;
    std::optional<std::string> expected;
    std::vector<SupraRow> rows;
    std::vector<BigInt> pointerTotals;
    BigInt totalPointers = 0;
    bool hasPrediction = false;
    std::vector<Rational> probabilities;
};

inline ItemResult fromPrediction(const GivenContext& given,
                                 const std::optional<std::string>& expected,
                                 const Prediction& p) {
    ItemResult r;
    r.given = given;
    r.expected = expected;
    for (const auto& a : p.perSupracontext)
        r.rows.push_back({a.mask, a.contained, a.homogeneous, pointerCounts(a)});
    r.pointerTotals = p.pointersByOutcome;
    r.totalPointers = p.totalPointers;
    r.hasPrediction = p.hasPrediction;
    r.probabilities = p.probabilities;
    return r;
}

inline ItemResult fromSchedule(const GivenContext& given,
                               const std::optional<std::string>& expected,
                               const ScheduleResult& s) {
    ItemResult r;
    r.given = given;
    r.expected = expected;
    r.pointerTotals.assign(s.outcomes.size(), 0);
    for (std::size_t l = 0; l < s.state.branches.size(); ++l) {
        const RegisterFile& rf = s.state.branches[l];
        SupraRow row;
        row.mask = s.state.masks[l];
        row.contained = rf.at("C").bits;
        row.homogeneous = rf.at("H").bits.test(0);
        const Bits& amp = rf.at("A").bits;
        std::uint64_t freq = amp.popcount();
        row.pointers.assign(s.outcomes.size(), 0);
        for (std::size_t j = 0; j < amp.size(); ++j)
            if (amp.test(j)) row.pointers[s.outcomeIdx[j]] += freq;
        for (std::size_t w = 0; w < s.outcomes.size(); ++w)
            r.pointerTotals[w] += row.pointers[w];
        r.rows.push_back(std::move(row));
    }
    for (const auto& c : r.pointerTotals) r.totalPointers += c;
    if (r.totalPointers > 0) {
        r.hasPrediction = true;
        for (const auto& c : r.pointerTotals)
            r.probabilities.emplace_back(Rational(c) / Rational(r.totalPointers));
    }
    return r;
}

/// Renders a mask the way the tables do: the given context's symbol where
/// the feature must match, '-' where it is ignored.
inline std::string maskPattern(SupraMask mask, const GivenContext& given) {
    std::size_t n = given.features.size();
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) s += ' ';
        s += ((mask >> (n - 1 - i)) & 1u) ? given.features[i] : "-";
    }
    return s;
}

inline std::string fractionString(const BigInt& num, const BigInt& den) {
    return num.str() + "/" + den.str();
}

/// Fixed-point decimal rendering, round half up. Fractions are
/// authoritative; this is display only.
inline std::string decimalString(const Rational& r, int places = 3) {
    BigInt scale = 1;
    for (int i = 0; i < places; ++i) scale *= 10;
    BigInt scaled = (boost::multiprecision::numerator(r) * scale * 2 +
                     boost::multiprecision::denominator(r)) /
                    (boost::multiprecision::denominator(r) * 2);
    std::string digits = scaled.str();
    while (digits.size() < std::size_t(places) + 1)
        digits.insert(digits.begin(), '0');
    digits.insert(digits.size() - places, ".");
    return digits;
}

inline std::string toText(const ItemResult& r, const Dataset& ds) {
    std::ostringstream out;
    out << "given:";
    for (const auto& f : r.given.features) out << ' ' << f;
    out << '\n';
    out << "supracontext | homogeneous | pointers\n";
    for (const auto& row : r.rows) {
        out << maskPattern(row.mask, r.given) << " | "
            << (row.homogeneous ? "yes" : "no") << " |";
        for (std::size_t w = 0; w < ds.outcomes.size(); ++w)
            out << ' ' << ds.outcomes[w] << ':' << row.pointers[w].str();
        out << '\n';
    }
    out << "pointer totals:";
    for (std::size_t w = 0; w < ds.outcomes.size(); ++w)
        out << ' ' << ds.outcomes[w] << ':' << r.pointerTotals[w].str();
    out << '\n';
    if (r.hasPrediction) {
        out << "probabilities:";
        for (std::size_t w = 0; w < ds.outcomes.size(); ++w)
            out << ' ' << ds.outcomes[w] << " = "
                << fractionString(r.pointerTotals[w], r.totalPointers) << " ("
                << decimalString(r.probabilities[w]) << ")";
        out << '\n';
    } else {
        out << "no prediction (no accessible pointers)\n";
    }
    return out.str();
}

inline nlohmann::json toJson(const ItemResult& r, const Dataset& ds) {
    nlohmann::json item;
    item["given"] = r.given.features;
    if (r.expected) item["expected"] = *r.expected;
    item["supracontexts"] = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json jrow;
        jrow["mask"] = maskPattern(row.mask, r.given);
        jrow["contained"] = row.contained.str();
        jrow["homogeneous"] = row.homogeneous;
        nlohmann::json pointers;
        for (std::size_t w = 0; w < ds.outcomes.size(); ++w)
            pointers[ds.outcomes[w]] = row.pointers[w].str();
        jrow["pointers"] = pointers;
        item["supracontexts"].push_back(jrow);
    }
    nlohmann::json totals;
    for (std::size_t w = 0; w < ds.outcomes.size(); ++w)
        totals[ds.outcomes[w]] = r.pointerTotals[w].str();
    item["pointerTotals"] = totals;
    if (r.hasPrediction) {
        nlohmann::json probs, decimals;
        for (std::size_t w = 0; w < ds.outcomes.size(); ++w) {
            probs[ds.outcomes[w]] =
                fractionString(r.pointerTotals[w], r.totalPointers);
            decimals[ds.outcomes[w]] = decimalString(r.probabilities[w]);
        }
        item["probabilities"] = probs;
        item["decimals"] = decimals;
    } else {
        item["noPrediction"] = true;
    }
    return item;
}

/// Empirical one-stage sampling summary for one test item.
struct SampleResult {
    std::size_t samples = 0;
    std::vector<std::size_t> counts;       // per outcome
    std::vector<Rational> exact;           // exact probabilities
};

inline SampleResult sampleOneStage(const ScheduleResult& s, std::size_t samples,
                                   std::uint64_t seed) {
    SampleResult result;
    result.samples = samples;
    result.counts.assign(s.outcomes.size(), 0);
    auto dist = outcomeDistribution(s);
    if (dist) result.exact = *dist;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < samples; ++i) {
        auto outcome = measureOneStage(s, rng);
        if (!outcome) break;  // no pointers anywhere; nothing to sample
        ++result.counts[*outcome];
    }
    return result;
}

} // namespace am

#endif
