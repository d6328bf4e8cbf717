#ifndef AM_DATASET_HPP
#define AM_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "am/bits.hpp"

namespace am {

/// One exemplar: a fixed-arity vector of feature symbols plus an outcome label.
struct DataItem {
    std::vector<std::string> features;
    std::string outcome;
};

/// The feature vector whose outcome is being predicted.
struct GivenContext {
    std::vector<std::string> features;
};

/// A test-set entry; the expected outcome, when present in the file, is
/// recorded but never used in prediction.
struct TestItem {
    GivenContext given;
    std::optional<std::string> expected;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct Dataset {
    std::size_t arity = 0;                 // n, identical across all items
    std::vector<std::string> outcomes;     // distinct, first-appearance order
    std::vector<DataItem> items;

    std::size_t outcomeIndex(const std::string& label) const {
        for (std::size_t i = 0; i < outcomes.size(); ++i)
            if (outcomes[i] == label) return i;
        throw std::invalid_argument("unknown outcome: " + label);
    }
};

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
    std::string stripped = line.substr(0, line.find('#'));
    std::istringstream in(stripped);
    std::vector<std::string> tokens;
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

} // namespace detail

/// Parses a dataset document. Each non-comment line is an outcome token
/// followed by n feature tokens; '#' starts a comment; blank lines are
/// ignored. Arity is inferred from the first item.
inline Dataset parseDataset(const std::string& text) {
    Dataset ds;
    std::istringstream in(text);
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        auto tokens = detail::tokenize(line);
        if (tokens.empty()) continue;
        if (tokens.size() < 2)
            throw ParseError(lineNo, "expected an outcome and at least one feature");
        if (ds.arity == 0) {
            ds.arity = tokens.size() - 1;
        } else if (tokens.size() - 1 != ds.arity) {
            throw ParseError(lineNo, "arity mismatch: expected " +
                                         std::to_string(ds.arity) + " features, got " +
                                         std::to_string(tokens.size() - 1));
        }
        DataItem item;
        item.outcome = tokens[0];
        item.features.assign(tokens.begin() + 1, tokens.end());
        bool known = false;
        for (const auto& o : ds.outcomes) known = known || o == item.outcome;
        if (!known) ds.outcomes.push_back(item.outcome);
        ds.items.push_back(std::move(item));
    }
    if (ds.items.empty()) throw ParseError(lineNo, "empty dataset");
    return ds;
}

/// Parses a test set of known arity. Lines with arity+1 tokens carry a
/// leading expected-outcome token; lines with exactly arity tokens do not.
inline std::vector<TestItem> parseTestSet(const std::string& text, std::size_t arity) {
    std::vector<TestItem> items;
    std::istringstream in(text);
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        auto tokens = detail::tokenize(line);
        if (tokens.empty()) continue;
        TestItem t;
        if (tokens.size() == arity) {
            t.given.features = tokens;
        } else if (tokens.size() == arity + 1) {
            t.expected = tokens[0];
            t.given.features.assign(tokens.begin() + 1, tokens.end());
        } else {
            throw ParseError(lineNo, "arity mismatch: expected " + std::to_string(arity) +
                                         " features (optionally preceded by an outcome), got " +
                                         std::to_string(tokens.size()) + " tokens");
        }
        items.push_back(std::move(t));
    }
    return items;
}

/// Interns feature symbols and outcomes to fixed-width bit codes.
/// Symbols get fresh 8-bit codes in first-appearance order; outcomes get
/// max(1, ceil(log2 K))-bit codes in first-appearance order.
class SymbolEncoding {
public:
    static constexpr std::size_t kSymbolWidth = 8;

    static SymbolEncoding build(const Dataset& ds) {
        SymbolEncoding enc;
        for (const auto& item : ds.items)
            for (const auto& sym : item.features) enc.intern(sym);
        enc.outcomes_ = ds.outcomes;
        enc.outcomeWidth_ = 1;
        while ((std::size_t(1) << enc.outcomeWidth_) < ds.outcomes.size())
            ++enc.outcomeWidth_;
        return enc;
    }

    /// A copy of this encoding with any unseen symbols interned. Test items
    /// may carry symbols absent from the data set; they get fresh codes and
    /// simply differ from everything.
    SymbolEncoding withSymbols(const std::vector<std::string>& symbols) const {
        SymbolEncoding enc = *this;
        for (const auto& sym : symbols) enc.intern(sym);
        return enc;
    }

    std::uint8_t symbolCode(const std::string& sym) const {
        auto it = table_.find(sym);
        if (it == table_.end())
            throw std::invalid_argument("unknown symbol: " + sym);
        return it->second;
    }

    std::size_t outcomeWidth() const { return outcomeWidth_; }

    std::size_t outcomeCode(const std::string& label) const {
        for (std::size_t i = 0; i < outcomes_.size(); ++i)
            if (outcomes_[i] == label) return i;
        throw std::invalid_argument("unknown outcome: " + label);
    }

    /// Symbol code as an 8-bit vector, most significant bit first.
    Bits symbolBits(const std::string& sym) const {
        std::uint8_t code = symbolCode(sym);
        Bits b(kSymbolWidth);
        for (std::size_t k = 0; k < kSymbolWidth; ++k)
            b.set(k, (code >> (kSymbolWidth - 1 - k)) & 1u);
        return b;
    }

private:
    std::uint8_t intern(const std::string& sym) {
        auto it = table_.find(sym);
        if (it != table_.end()) return it->second;
        if (table_.size() >= 256)
            throw std::length_error("more than 256 distinct feature symbols");
        std::uint8_t code = static_cast<std::uint8_t>(table_.size());
        table_.emplace(sym, code);
        return code;
    }

    std::map<std::string, std::uint8_t> table_;
    std::vector<std::string> outcomes_;
    std::size_t outcomeWidth_ = 1;
};

/// An n-bit difference vector packed into an integer: feature 1 is the most
/// significant of the n bits, so the integer reads the same as the paper's
/// bit strings (e.g. "110" = 6).
using DiffVector = std::uint64_t;

inline void checkArity(std::size_t a, std::size_t b) {
    if (a != b)
        throw std::invalid_argument("arity mismatch: " + std::to_string(a) +
                                    " vs " + std::to_string(b));
}

/// Bit i = 1 iff feature i of the item differs from the given context.
/// Exact token equality, no normalization.
inline DiffVector differenceVector(const std::vector<std::string>& item,
                                   const std::vector<std::string>& given) {
    checkArity(item.size(), given.size());
    std::size_t n = given.size();
    DiffVector d = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (item[i] != given[i]) d |= DiffVector(1) << (n - 1 - i);
    return d;
}

inline DiffVector differenceVector(const DataItem& item, const GivenContext& given) {
    return differenceVector(item.features, given.features);
}

inline std::vector<DiffVector> differenceVectors(const Dataset& ds,
                                                 const GivenContext& given) {
    std::vector<DiffVector> diffs;
    diffs.reserve(ds.items.size());
    for (const auto& item : ds.items)
        diffs.push_back(differenceVector(item, given));
    return diffs;
}

inline std::string diffString(DiffVector d, std::size_t n) {
    std::string s(n, '0');
    for (std::size_t i = 0; i < n; ++i)
        if ((d >> (n - 1 - i)) & 1u) s[i] = '1';
    return s;
}

inline Bits diffBits(DiffVector d, std::size_t n) {
    return Bits::fromString(diffString(d, n));
}

/// Feature vectors: F[i] bit j = 1 iff item j agrees with the given context
/// on feature i. These are the match-encoded subcontexts restricted to one
/// feature variable, i.e. the complement of column i of the difference matrix.
inline std::vector<Bits> featureVectors(const std::vector<DiffVector>& diffs,
                                        std::size_t n) {
    if (diffs.empty()) throw std::invalid_argument("featureVectors: no items");
    std::size_t m = diffs.size();
    std::vector<Bits> fs(n, Bits(m));
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i)
            fs[i].set(j, !((diffs[j] >> (n - 1 - i)) & 1u));
    return fs;
}

/// Outcome bit planes: Omega[iota] bit j = bit iota of item j's outcome code.
inline std::vector<Bits> outcomeVectors(const Dataset& ds, const SymbolEncoding& enc) {
    std::size_t m = ds.items.size();
    std::size_t w = enc.outcomeWidth();
    std::vector<Bits> omega(w, Bits(m));
    for (std::size_t j = 0; j < m; ++j) {
        std::size_t code = enc.outcomeCode(ds.items[j].outcome);
        for (std::size_t iota = 0; iota < w; ++iota)
            omega[iota].set(j, (code >> iota) & 1u);
    }
    return omega;
}

} // namespace am

#endif
