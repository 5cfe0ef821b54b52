#include "zpsync/window_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "zpsync/errors.hpp"

namespace zpsync {

namespace {

constexpr std::array<char, 4> kMagic{'Z', 'P', 'S', 'W'};

template <typename T>
void put_le(std::ostream& out, T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    U bits = std::bit_cast<U>(value);
    std::array<char, sizeof(U)> bytes{};
    for (std::size_t k = 0; k < sizeof(U); ++k) {
        bytes[k] = static_cast<char>((bits >> (8 * k)) & 0xffu);
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

template <typename T>
T get_le(std::istream& in) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    std::array<unsigned char, sizeof(U)> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()))) {
        throw ArgumentError("window file truncated");
    }
    U bits = 0;
    for (std::size_t k = 0; k < sizeof(U); ++k) bits |= static_cast<U>(bytes[k]) << (8 * k);
    return std::bit_cast<T>(bits);
}

} // namespace

void write_window(std::ostream& out, const ObservationWindow& window) {
    out.write(kMagic.data(), kMagic.size());
    put_le(out, static_cast<std::uint32_t>(window.num_symbols));
    put_le(out, static_cast<std::uint32_t>(window.n_s));
    put_le(out, static_cast<std::int32_t>(window.true_d));
    for (const auto& y : window.samples) {
        put_le(out, y.real());
        put_le(out, y.imag());
    }
    if (!out) throw ArgumentError("failed to write window");
}

void write_window(const std::string& path, const ObservationWindow& window) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot open " + path + " for writing");
    write_window(out, window);
}

ObservationWindow read_window(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw ArgumentError("not a window file (bad magic)");
    }
    ObservationWindow w;
    w.num_symbols = static_cast<int>(get_le<std::uint32_t>(in));
    w.n_s = static_cast<int>(get_le<std::uint32_t>(in));
    w.true_d = get_le<std::int32_t>(in);
    const auto count = static_cast<std::size_t>(w.num_symbols) * static_cast<std::size_t>(w.n_s);
    w.samples.resize(count);
    for (auto& y : w.samples) {
        const double re = get_le<double>(in);
        const double im = get_le<double>(in);
        y = {re, im};
    }
    return w;
}

ObservationWindow read_window(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open " + path);
    return read_window(in);
}

} // namespace zpsync
