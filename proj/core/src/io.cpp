#include "dkgqa/io.hpp"

#include <bit>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace dkgqa {

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw std::runtime_error("binary read: unexpected end of file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void write_f64(std::ostream& out, double v) {
    write_u64(out, std::bit_cast<std::uint64_t>(v));
}

double read_f64(std::istream& in) {
    return std::bit_cast<double>(read_u64(in));
}

void write_f64_array(std::ostream& out, std::span<const double> v) {
    for (double x : v) write_f64(out, x);
}

void read_f64_array(std::istream& in, std::span<double> v) {
    for (double& x : v) x = read_f64(in);
}

void write_string(std::ostream& out, const std::string& s) {
    write_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
    const std::uint64_t n = read_u64(in);
    if (n > (1u << 30)) throw std::runtime_error("binary read: implausible string length");
    std::string s(n, '\0');
    in.read(s.data(), static_cast<std::streamsize>(n));
    if (!in) throw std::runtime_error("binary read: unexpected end of file");
    return s;
}

void write_magic(std::ostream& out, const char magic[4]) {
    out.write(magic, 4);
}

void expect_magic(std::istream& in, const char magic[4], const std::string& what) {
    char got[4] = {};
    in.read(got, 4);
    if (!in || got[0] != magic[0] || got[1] != magic[1] || got[2] != magic[2] || got[3] != magic[3]) {
        throw std::runtime_error(what + ": bad magic bytes (not a " + std::string(magic, 4) + " file)");
    }
}

}  // namespace dkgqa
