#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace hornver {

/// Exact rational arithmetic. mpq_class keeps values canonical (lowest terms,
/// positive denominator) for all arithmetic results; only values built from
/// raw integer pairs need an explicit canonicalize().
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

/// Parses "123", "-7" or "3/4". Returns nullopt on malformed input or a zero
/// denominator.
std::optional<Rat> rat_parse(const std::string& text);

/// Renders as "n" for integers and "n/d" otherwise.
std::string rat_str(const Rat& q);

inline bool rat_is_int(const Rat& q) { return q.get_den() == 1; }

}  // namespace hornver
