#ifndef AM_CIRCUIT_HPP
#define AM_CIRCUIT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "am/bits.hpp"
#include "am/dataset.hpp"
#include "am/engine.hpp"
#include "am/numeric.hpp"

namespace am {

enum class RegKind { Substantive, Auxiliary, Constant };

/// A named bit register. Bits are strictly 0/1 by construction.
struct Register {
    std::string name;
    RegKind kind;
    Bits bits;
};

class RegisterFile {
public:
    void add(std::string name, RegKind kind, Bits bits) {
        if (index_.count(name))
            throw std::invalid_argument("duplicate register: " + name);
        index_[name] = regs_.size();
        regs_.push_back(Register{std::move(name), kind, std::move(bits)});
    }

    Register& at(const std::string& name) {
        auto it = index_.find(name);
        if (it == index_.end())
            throw std::invalid_argument("no such register: " + name);
        return regs_[it->second];
    }
    const Register& at(const std::string& name) const {
        return const_cast<RegisterFile*>(this)->at(name);
    }
    bool has(const std::string& name) const { return index_.count(name) != 0; }

    const std::vector<Register>& registers() const { return regs_; }

private:
    std::vector<Register> regs_;
    std::map<std::string, std::size_t> index_;
};

/// Gate operand: a whole register (broadcast over aligned indices) or one bit.
struct Operand {
    std::string reg;
    std::optional<std::size_t> bit;
};

/// NOT / CNOT / CCNOT; each fundamental gate is self-inverse, so the inverse
/// of a sequence is the same gates in reversed order.
struct Gate {
    enum class Type { Not, Cnot, Ccnot };
    Type type;
    Operand target;
    std::optional<Operand> control1;
    std::optional<Operand> control2;

    static Gate Not(Operand t) { return {Type::Not, std::move(t), {}, {}}; }
    static Gate Cnot(Operand c, Operand t) {
        return {Type::Cnot, std::move(t), std::move(c), {}};
    }
    static Gate Ccnot(Operand c1, Operand c2, Operand t) {
        return {Type::Ccnot, std::move(t), std::move(c1), std::move(c2)};
    }
};

using GateSequence = std::vector<Gate>;

/// Applies one gate to one register file; returns the number of fundamental
/// gate applications (the broadcast form counts one per index).
inline std::size_t applyGateToFile(RegisterFile& rf, const Gate& g,
                                   bool allowConstantWrite = false) {
    Register& tgt = rf.at(g.target.reg);
    if (tgt.kind == RegKind::Constant && !allowConstantWrite)
        throw std::logic_error("write to constant register " + tgt.name);

    std::vector<const Operand*> controls;
    if (g.control1) controls.push_back(&*g.control1);
    if (g.control2) controls.push_back(&*g.control2);

    const bool broadcast = !g.target.bit.has_value();
    for (const Operand* c : controls) {
        const Register& creg = rf.at(c->reg);
        if (broadcast) {
            if (c->bit.has_value() || creg.bits.size() != tgt.bits.size())
                throw std::invalid_argument("width mismatch on broadcast gate");
            if (c->reg == g.target.reg)
                throw std::logic_error("gate target aliases a control: " + c->reg);
        } else {
            if (!c->bit.has_value() || *c->bit >= creg.bits.size())
                throw std::invalid_argument("control bit out of range on " + c->reg);
            if (c->reg == g.target.reg && *c->bit == *g.target.bit)
                throw std::logic_error("gate target aliases a control: " + c->reg);
        }
    }

    if (broadcast) {
        for (std::size_t k = 0; k < tgt.bits.size(); ++k) {
            bool fire = true;
            for (const Operand* c : controls)
                fire = fire && rf.at(c->reg).bits.test(k);
            if (fire) tgt.bits.flip(k);
        }
        return tgt.bits.size();
    }

    if (*g.target.bit >= tgt.bits.size())
        throw std::invalid_argument("target bit out of range on " + tgt.name);
    bool fire = true;
    for (const Operand* c : controls)
        fire = fire && rf.at(c->reg).bits.test(*c->bit);
    if (fire) tgt.bits.flip(*g.target.bit);
    return 1;
}

/// One classical register file per supracontext branch. Gates apply
/// universally: the same gate runs in every branch.
struct BranchedState {
    std::size_t n = 0, m = 0, omega = 0;
    std::vector<SupraMask> masks;        // canonical order; masks[l] pins branch l's S
    std::vector<RegisterFile> branches;
    std::uint64_t perBranchGateCount = 0;
};

inline void applyGate(BranchedState& st, const Gate& g,
                      bool allowConstantWrite = false) {
    std::size_t count = 0;
    for (auto& branch : st.branches)
        count = applyGateToFile(branch, g, allowConstantWrite);
    st.perBranchGateCount += count;
}

// ---------------------------------------------------------------------------
// Derived operators. Each *Inverse replays the same fundamental gates in
// reversed order; same-order replay does not restore the auxiliaries.
// ---------------------------------------------------------------------------

/// X bit k evolves to 0 exactly where A and B differ (X starts all ones).
inline void compare(BranchedState& st, const std::string& A, const std::string& B,
                    const std::string& X) {
    applyGate(st, Gate::Cnot({A}, {X}));
    applyGate(st, Gate::Cnot({B}, {X}));
}

inline void compareInverse(BranchedState& st, const std::string& A,
                           const std::string& B, const std::string& X) {
    applyGate(st, Gate::Cnot({B}, {X}));
    applyGate(st, Gate::Cnot({A}, {X}));
}

/// Y (width L+1, starts all zeros) evolves so that Y_L = 1 iff X is all ones.
inline void ones(BranchedState& st, const std::string& X, const std::string& Y) {
    std::size_t L = st.branches.front().at(X).bits.size();
    applyGate(st, Gate::Not({Y, 0}));
    for (std::size_t k = 1; k <= L; ++k)
        applyGate(st, Gate::Ccnot({X, k - 1}, {Y, k - 1}, {Y, k}));
}

inline void onesInverse(BranchedState& st, const std::string& X, const std::string& Y) {
    std::size_t L = st.branches.front().at(X).bits.size();
    for (std::size_t k = L; k >= 1; --k)
        applyGate(st, Gate::Ccnot({X, k - 1}, {Y, k - 1}, {Y, k}));
    applyGate(st, Gate::Not({Y, 0}));
}

/// After identityTest, Y_L = 1 iff A = B.
inline void identityTest(BranchedState& st, const std::string& A, const std::string& B,
                         const std::string& X, const std::string& Y) {
    compare(st, A, B, X);
    ones(st, X, Y);
}

inline void identityTestInverse(BranchedState& st, const std::string& A,
                                const std::string& B, const std::string& X,
                                const std::string& Y) {
    onesInverse(st, X, Y);
    compareInverse(st, A, B, X);
}

// ---------------------------------------------------------------------------
// Data preparation: gate-level difference vectors.
// ---------------------------------------------------------------------------

struct DifferenceBuildResult {
    std::vector<Bits> diffs;       // one n-bit vector per data item
    std::uint64_t gateCount = 0;
};

/// Computes every D[j] with the gate machinery alone: per feature, an
/// identity test on the symbol codes, a copy of the negated verdict into D,
/// and the inverse identity test to recycle the auxiliaries.
inline DifferenceBuildResult buildDifferenceVectors(const Dataset& ds,
                                                    const GivenContext& given,
                                                    const SymbolEncoding& enc) {
    checkArity(given.features.size(), ds.arity);
    const std::size_t n = ds.arity;
    const std::size_t ell = SymbolEncoding::kSymbolWidth;

    DifferenceBuildResult result;
    for (const auto& item : ds.items) {
        BranchedState st;
        st.branches.emplace_back();
        RegisterFile& rf = st.branches.front();
        for (std::size_t i = 0; i < n; ++i) {
            rf.add("A" + std::to_string(i + 1), RegKind::Constant,
                   enc.symbolBits(item.features[i]));
            rf.add("B" + std::to_string(i + 1), RegKind::Constant,
                   enc.symbolBits(given.features[i]));
        }
        rf.add("X", RegKind::Auxiliary, Bits::ones(ell));
        rf.add("Y", RegKind::Auxiliary, Bits::zeros(ell + 1));
        rf.add("D", RegKind::Substantive, Bits::ones(n));

        for (std::size_t i = 0; i < n; ++i) {
            std::string A = "A" + std::to_string(i + 1);
            std::string B = "B" + std::to_string(i + 1);
            identityTest(st, A, B, "X", "Y");
            applyGate(st, Gate::Cnot({"Y", ell}, {"D", i}));
            identityTestInverse(st, A, B, "X", "Y");
        }
        result.gateCount += st.perBranchGateCount;
        result.diffs.push_back(rf.at("D").bits);
    }
    return result;
}

// ---------------------------------------------------------------------------
// The branched schedule.
// ---------------------------------------------------------------------------

struct TraceCheckpoint {
    std::string name;
    std::vector<RegisterFile> branches;  // snapshot, canonical branch order
};

struct ScheduleResult {
    BranchedState state;
    std::vector<std::size_t> outcomeIdx;  // per data item
    std::vector<std::string> outcomes;    // dataset outcome labels
    std::uint64_t diffGateCount = 0;      // gates spent preparing D
    std::vector<TraceCheckpoint> trace;   // captured only when requested
};

namespace detail {

inline std::string dReg(std::size_t j) { return "D" + std::to_string(j + 1); }
inline std::string fReg(std::size_t i) { return "F" + std::to_string(i + 1); }
inline std::string omegaReg(std::size_t iota) {
    return "Omega" + std::to_string(iota + 1);
}

inline BranchedState initialState(std::size_t n, std::size_t m, std::size_t omega,
                                  const std::vector<Bits>& diffs,
                                  const std::vector<Bits>& features,
                                  const std::vector<Bits>& outcomes) {
    BranchedState st;
    st.n = n;
    st.m = m;
    st.omega = omega;
    st.masks = canonicalMasks(n);
    st.branches.reserve(st.masks.size());
    for (SupraMask mask : st.masks) {
        RegisterFile rf;
        rf.add("S", RegKind::Substantive, diffBits(mask, n));
        rf.add("C", RegKind::Substantive, Bits::zeros(m));
        rf.add("P", RegKind::Substantive, Bits::ones(n));
        rf.add("Q", RegKind::Substantive, Bits::ones(omega));
        rf.add("M", RegKind::Substantive, Bits::ones(1));
        rf.add("N", RegKind::Substantive, Bits::ones(1));
        rf.add("H", RegKind::Substantive, Bits::ones(1));
        rf.add("A", RegKind::Substantive, Bits::zeros(m));
        rf.add("U", RegKind::Auxiliary, Bits::zeros(n));
        rf.add("V", RegKind::Auxiliary, Bits::zeros(n));
        rf.add("W", RegKind::Auxiliary, Bits::ones(n));
        rf.add("Z", RegKind::Auxiliary, Bits::zeros(n + 1));
        rf.add("X", RegKind::Auxiliary, Bits::ones(m));
        rf.add("Y", RegKind::Auxiliary, Bits::zeros(m + 1));
        rf.add("Phi", RegKind::Auxiliary, Bits::zeros(omega));
        rf.add("Psi", RegKind::Auxiliary, Bits::zeros(omega));
        rf.add("Upsilon", RegKind::Auxiliary, Bits::zeros(omega + 1));
        for (std::size_t j = 0; j < m; ++j)
            rf.add(dReg(j), RegKind::Constant, diffs[j]);
        for (std::size_t i = 0; i < n; ++i)
            rf.add(fReg(i), RegKind::Constant, features[i]);
        for (std::size_t iota = 0; iota < omega; ++iota)
            rf.add(omegaReg(iota), RegKind::Constant, outcomes[iota]);
        st.branches.push_back(std::move(rf));
    }
    return st;
}

} // namespace detail

/// Per branch, C_j evolves to 1 iff (S AND D[j]) = 0; W and Z are recycled
/// between items via the paired inverses.
inline void inclusion(BranchedState& st) {
    for (std::size_t j = 0; j < st.m; ++j) {
        applyGate(st, Gate::Ccnot({"S"}, {detail::dReg(j)}, {"W"}));
        ones(st, "W", "Z");
        applyGate(st, Gate::Cnot({"Z", st.n}, {"C", j}));
        onesInverse(st, "W", "Z");
        applyGate(st, Gate::Ccnot({"S"}, {detail::dReg(j)}, {"W"}));
    }
}

namespace detail {

/// Shared zeros-then-ones invariance pass: result bit i of `combined` ends 1
/// iff vector(i) is constant over the items contained in the branch. U- and
/// V-style collectors are left negated afterward, as scheduled.
inline void invariancePass(BranchedState& st,
                           const std::vector<std::string>& vectors,
                           const std::string& collectZeros,
                           const std::string& collectOnes,
                           const std::string& combined) {
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const std::string& vec = vectors[i];
        // testing for zeros
        applyGate(st, Gate::Ccnot({"C"}, {vec}, {"X"}));
        ones(st, "X", "Y");
        applyGate(st, Gate::Cnot({"Y", st.m}, {collectZeros, i}));
        onesInverse(st, "X", "Y");
        applyGate(st, Gate::Ccnot({"C"}, {vec}, {"X"}));
        // testing for ones: the constant is negated in place and negated back
        applyGate(st, Gate::Not({vec}), /*allowConstantWrite=*/true);
        applyGate(st, Gate::Ccnot({"C"}, {vec}, {"X"}));
        ones(st, "X", "Y");
        applyGate(st, Gate::Cnot({"Y", st.m}, {collectOnes, i}));
        onesInverse(st, "X", "Y");
        applyGate(st, Gate::Ccnot({"C"}, {vec}, {"X"}));
        applyGate(st, Gate::Not({vec}), /*allowConstantWrite=*/true);
        // all zeros or all ones?
        applyGate(st, Gate::Not({collectZeros, i}));
        applyGate(st, Gate::Not({collectOnes, i}));
        applyGate(st, Gate::Ccnot({collectZeros, i}, {collectOnes, i}, {combined, i}));
    }
}

} // namespace detail

/// P_i ends 1 iff feature i is constant over the contained items; M ends 1
/// iff the branch has plural subcontexts.
inline void pluralityOfFeatures(BranchedState& st) {
    std::vector<std::string> vecs;
    for (std::size_t i = 0; i < st.n; ++i) vecs.push_back(detail::fReg(i));
    detail::invariancePass(st, vecs, "U", "V", "P");
    ones(st, "P", "Z");
    applyGate(st, Gate::Cnot({"Z", st.n}, {"M", 0}));
    onesInverse(st, "P", "Z");
}

/// Q_iota ends 1 iff outcome bit iota is constant over the contained items;
/// N ends 1 iff the branch has plural outcomes.
inline void pluralityOfOutcomes(BranchedState& st) {
    std::vector<std::string> vecs;
    for (std::size_t iota = 0; iota < st.omega; ++iota)
        vecs.push_back(detail::omegaReg(iota));
    detail::invariancePass(st, vecs, "Phi", "Psi", "Q");
    ones(st, "Q", "Upsilon");
    applyGate(st, Gate::Cnot({"Upsilon", st.omega}, {"N", 0}));
    onesInverse(st, "Q", "Upsilon");
}

/// H flips to 0 iff M = N = 1 (heterogeneous); then A copies C under H.
inline void homogeneityAndAmplitude(BranchedState& st) {
    applyGate(st, Gate::Ccnot({"M", 0}, {"N", 0}, {"H", 0}));
    for (std::size_t j = 0; j < st.m; ++j)
        applyGate(st, Gate::Ccnot({"C", j}, {"H", 0}, {"A", j}));
}

/// Runs the full gate schedule for one given context: data preparation,
/// inclusion, both plurality passes, homogeneity, amplitude.
inline ScheduleResult runSchedule(const Dataset& ds, const GivenContext& given,
                                  bool captureTrace = false,
                                  std::size_t arityCap = kDefaultArityCap) {
    checkArity(given.features.size(), ds.arity);
    if (ds.arity > arityCap)
        throw std::length_error("arity " + std::to_string(ds.arity) +
                                " exceeds the 2^n branch cap of " +
                                std::to_string(arityCap));

    SymbolEncoding enc = SymbolEncoding::build(ds).withSymbols(given.features);
    ScheduleResult result;
    result.outcomes = ds.outcomes;
    result.outcomeIdx = outcomeIndices(ds);

    auto diffBuild = buildDifferenceVectors(ds, given, enc);
    result.diffGateCount = diffBuild.gateCount;

    std::vector<DiffVector> packedDiffs;
    for (const auto& d : diffBuild.diffs) {
        DiffVector v = 0;
        for (std::size_t i = 0; i < d.size(); ++i)
            if (d.test(i)) v |= DiffVector(1) << (d.size() - 1 - i);
        packedDiffs.push_back(v);
    }
    auto features = featureVectors(packedDiffs, ds.arity);
    auto outcomes = outcomeVectors(ds, enc);

    result.state = detail::initialState(ds.arity, ds.items.size(),
                                        enc.outcomeWidth(), diffBuild.diffs,
                                        features, outcomes);

    auto checkpoint = [&](const std::string& name) {
        if (captureTrace)
            result.trace.push_back({name, result.state.branches});
    };

    inclusion(result.state);
    checkpoint("after inclusion");
    pluralityOfFeatures(result.state);
    checkpoint("after plurality of features");
    pluralityOfOutcomes(result.state);
    checkpoint("after plurality of outcomes");
    applyGate(result.state, Gate::Ccnot({"M", 0}, {"N", 0}, {"H", 0}));
    checkpoint("after homogeneity");
    for (std::size_t j = 0; j < result.state.m; ++j)
        applyGate(result.state, Gate::Ccnot({"C", j}, {"H", 0}, {"A", j}));
    checkpoint("after amplitude");
    return result;
}

/// Line-oriented trace: `checkpoint TAB mask-bits TAB register-name TAB bits`,
/// branches in canonical order. Bit-exact for golden-file comparison.
inline std::string traceDump(const ScheduleResult& r,
                             const std::vector<std::string>& registerNames) {
    std::ostringstream out;
    for (const auto& cp : r.trace) {
        for (std::size_t l = 0; l < cp.branches.size(); ++l) {
            for (const auto& name : registerNames) {
                out << cp.name << '\t' << diffString(r.state.masks[l], r.state.n)
                    << '\t' << name << '\t' << cp.branches[l].at(name).bits.str()
                    << '\n';
            }
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Measurement.
// ---------------------------------------------------------------------------

/// Exact outcome distribution induced by the amplitudes: branch weight is
/// popcount(A)^2, items within a branch are equiprobable.
inline std::optional<std::vector<Rational>> outcomeDistribution(
    const ScheduleResult& r) {
    std::vector<BigInt> pointerTotals(r.outcomes.size(), 0);
    BigInt total = 0;
    for (const auto& branch : r.state.branches) {
        const Bits& amp = branch.at("A").bits;
        std::uint64_t w = amp.popcount();
        if (w == 0) continue;
        total += BigInt(w) * w;
        for (std::size_t j = 0; j < amp.size(); ++j)
            if (amp.test(j)) pointerTotals[r.outcomeIdx[j]] += w;
    }
    if (total == 0) return std::nullopt;
    std::vector<Rational> dist;
    for (const auto& p : pointerTotals)
        dist.emplace_back(Rational(p) / Rational(total));
    return dist;
}

/// One-stage observation: a uniform draw over all pointers, i.e. ordered
/// pairs of amplitude-set items within the same branch. Returns the target
/// item's outcome index, or nullopt when every amplitude is zero.
inline std::optional<std::size_t> measureOneStage(const ScheduleResult& r,
                                                  std::mt19937_64& rng) {
    std::uint64_t total = 0;
    std::vector<std::uint64_t> weights;
    weights.reserve(r.state.branches.size());
    for (const auto& branch : r.state.branches) {
        std::uint64_t w = branch.at("A").bits.popcount();
        weights.push_back(w);
        total += w * w;
    }
    if (total == 0) return std::nullopt;

    std::uniform_int_distribution<std::uint64_t> dist(0, total - 1);
    std::uint64_t pick = dist(rng);
    for (std::size_t l = 0; l < weights.size(); ++l) {
        std::uint64_t w = weights[l];
        if (pick >= w * w) {
            pick -= w * w;
            continue;
        }
        // Pointer (source, target); the prediction reads the target.
        std::uint64_t targetRank = pick % w;
        const Bits& amp = r.state.branches[l].at("A").bits;
        for (std::size_t j = 0; j < amp.size(); ++j) {
            if (!amp.test(j)) continue;
            if (targetRank == 0) return r.outcomeIdx[j];
            --targetRank;
        }
    }
    throw std::logic_error("measureOneStage: inconsistent weights");
}

/// Two-stage observation: pick a branch with probability popcount(A)^2 over
/// the total, then a contained item uniformly.
inline std::optional<std::pair<SupraMask, std::size_t>> measureTwoStage(
    const ScheduleResult& r, std::mt19937_64& rng) {
    std::uint64_t total = 0;
    std::vector<std::uint64_t> weights;
    for (const auto& branch : r.state.branches) {
        std::uint64_t w = branch.at("A").bits.popcount();
        weights.push_back(w);
        total += w * w;
    }
    if (total == 0) return std::nullopt;

    std::uniform_int_distribution<std::uint64_t> branchDist(0, total - 1);
    std::uint64_t pick = branchDist(rng);
    for (std::size_t l = 0; l < weights.size(); ++l) {
        std::uint64_t w = weights[l];
        if (pick >= w * w) {
            pick -= w * w;
            continue;
        }
        std::uniform_int_distribution<std::uint64_t> itemDist(0, w - 1);
        std::uint64_t rank = itemDist(rng);
        const Bits& amp = r.state.branches[l].at("A").bits;
        for (std::size_t j = 0; j < amp.size(); ++j) {
            if (!amp.test(j)) continue;
            if (rank == 0) return std::make_pair(r.state.masks[l], r.outcomeIdx[j]);
            --rank;
        }
    }
    throw std::logic_error("measureTwoStage: inconsistent weights");
}

} // namespace am

#endif
