#include "lrtsd/harness/tensor_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace lrtsd::harness {

namespace {

constexpr std::size_t kHeaderBytes = 4 + 3 * 8;

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint64_t get_u64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
    return v;
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const Tensor3& t) {
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderBytes + 8 * t.size());
    out.insert(out.end(), std::begin(kTensorMagic), std::end(kTensorMagic));
    for (const auto d : t.dims()) put_u64(out, d);
    for (const double v : t.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
    return out;
}

Tensor3 decode_tensor(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < kHeaderBytes) throw FormatError("tensor file: truncated header");
    if (std::memcmp(bytes.data(), kTensorMagic, 4) != 0) throw FormatError("tensor file: bad magic, expected LRT1");
    Dims3 dims{};
    std::uint64_t count = 1;
    for (int m = 0; m < 3; ++m) {
        const std::uint64_t d = get_u64(bytes.data() + 4 + 8 * m);
        if (d == 0) throw FormatError("tensor file: zero dimension");
        if (count > std::numeric_limits<std::uint64_t>::max() / d) throw FormatError("tensor file: dimensions overflow");
        count *= d;
        dims[static_cast<std::size_t>(m)] = d;
    }
    if ((bytes.size() - kHeaderBytes) % 8 != 0 || (bytes.size() - kHeaderBytes) / 8 != count) {
        throw FormatError("tensor file: payload length " + std::to_string(bytes.size() - kHeaderBytes) +
                          " bytes does not match dimensions");
    }
    std::vector<double> data(count);
    const std::uint8_t* p = bytes.data() + kHeaderBytes;
    for (std::uint64_t i = 0; i < count; ++i) data[i] = std::bit_cast<double>(get_u64(p + 8 * i));
    return Tensor3(dims, std::move(data));
}

void write_tensor(const std::filesystem::path& path, const Tensor3& t) {
    const auto bytes = encode_tensor(t);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing " + path.string());
}

Tensor3 read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("failed reading " + path.string());
    return decode_tensor(bytes);
}

}  // namespace lrtsd::harness
