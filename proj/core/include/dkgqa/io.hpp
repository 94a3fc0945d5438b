#pragma once
// Little-endian binary primitives shared by the .dkg store format and the
// .dkm checkpoint format. Byte order is fixed so files move between hosts.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dkgqa {

void write_u64(std::ostream& out, std::uint64_t v);
std::uint64_t read_u64(std::istream& in);

void write_f64(std::ostream& out, double v);
double read_f64(std::istream& in);

void write_f64_array(std::ostream& out, std::span<const double> v);
void read_f64_array(std::istream& in, std::span<double> v);

// u64 length prefix followed by raw bytes.
void write_string(std::ostream& out, const std::string& s);
std::string read_string(std::istream& in);

void write_magic(std::ostream& out, const char magic[4]);
void expect_magic(std::istream& in, const char magic[4], const std::string& what);

}  // namespace dkgqa
