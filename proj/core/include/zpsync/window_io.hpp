#pragma once

#include <iosfwd>
#include <string>

#include "zpsync/signal.hpp"

namespace zpsync {

/// Raw window dump: 16-byte header {"ZPSW", u32 N, u32 n_s, i32 true_d}
/// followed by N*n_s little-endian f64 (I, Q) pairs.
void write_window(std::ostream& out, const ObservationWindow& window);
void write_window(const std::string& path, const ObservationWindow& window);

/// Throws ArgumentError on a bad magic, truncated payload or I/O failure.
ObservationWindow read_window(std::istream& in);
ObservationWindow read_window(const std::string& path);

} // namespace zpsync
