#include "kb/io.hpp"

#include <fstream>
#include <sstream>

namespace kb {
namespace {

void write_header_and_bits(const std::string& path, const std::string& header, const BitString& bits) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot open for writing: " + path);
    out << header << '\n';
    const auto& bytes = bits.bytes();
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InvalidArgument("write failed: " + path);
}

std::pair<std::string, std::vector<std::uint8_t>> read_header_and_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open: " + path);
    std::string header;
    if (!std::getline(in, header)) throw InvalidArgument("missing header line: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return {header, bytes};
}

} // namespace

void write_bits_file(const std::string& path, const BitString& bits) {
    write_header_and_bits(path, "KBITS1 " + std::to_string(bits.size()), bits);
}

BitString read_bits_file(const std::string& path) {
    auto [header, bytes] = read_header_and_bytes(path);
    std::istringstream hs(header);
    std::string magic;
    std::size_t nbits = 0;
    hs >> magic >> nbits;
    if (magic != "KBITS1") throw InvalidArgument("not a KBITS1 file: " + path);
    return BitString::from_bytes(bytes, nbits);
}

void write_klz_file(const std::string& path, const BitString& code) {
    write_header_and_bits(path, "KLZ1 " + std::to_string(code.size()), code);
}

BitString read_klz_file(const std::string& path) {
    auto [header, bytes] = read_header_and_bytes(path);
    std::istringstream hs(header);
    std::string magic;
    std::size_t nbits = 0;
    hs >> magic >> nbits;
    if (magic != "KLZ1") throw InvalidArgument("not a KLZ1 file: " + path);
    return BitString::from_bytes(bytes, nbits);
}

void write_dataset_file(const std::string& path, const StackedDataset& d) {
    std::string header = "KBDS1 " + std::to_string(d.count()) + " " + std::to_string(d.width_bits()) +
                         " " + ordering_tag(d.ordering(), d.order_seed());
    BitString bits;
    for (std::size_t i = 0; i < d.count(); ++i) bits.append(d.image(i).bits());
    write_header_and_bits(path, header, bits);
}

StackedDataset read_dataset_file(const std::string& path) {
    auto [header, bytes] = read_header_and_bytes(path);
    std::istringstream hs(header);
    std::string magic, tag;
    std::size_t count = 0, width = 0;
    hs >> magic >> count >> width >> tag;
    if (magic != "KBDS1") throw MalformedDataset("not a KBDS1 file: " + path);
    if (bytes.size() * 8 < count * width)
        throw MalformedDataset("dataset payload shorter than count*width: " + path);
    auto [ordering, seed] = parse_ordering_tag(tag);
    BitString all = BitString::from_bytes(bytes, count * width);
    StackedDataset d(width, ordering);
    d.set_ordering(ordering, seed);
    for (std::size_t i = 0; i < count; ++i) d.add(Image(all.slice(i * width, width)));
    return d;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open: " + path);
    return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::uint64_t fnv64(const std::vector<std::uint8_t>& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string fnv64_hex_of_file(const std::string& path) {
    std::uint64_t h = fnv64(read_file_bytes(path));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace kb
