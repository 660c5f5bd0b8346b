#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kb/bits.hpp"
#include "kb/dataset.hpp"

namespace kb {

// On-disk formats. All headers are a single ASCII line terminated by '\n',
// followed by raw packed bits (MSB-first per byte, zero-padded last byte):
//   .bits   "KBITS1 <nbits>"
//   .klz    "KLZ1 <code_bits>"
//   .kbds   "KBDS1 <count> <width_bits> <ordering-tag>"
// Ordering tags: lex | gen | perm:<seed>.

void write_bits_file(const std::string& path, const BitString& bits);
BitString read_bits_file(const std::string& path);

void write_klz_file(const std::string& path, const BitString& code);
BitString read_klz_file(const std::string& path);

void write_dataset_file(const std::string& path, const StackedDataset& d);
StackedDataset read_dataset_file(const std::string& path);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes);

/// FNV-1a over a byte buffer; used for input/output hashes in run manifests
/// and config hashes in experiment reports.
std::uint64_t fnv64(const std::vector<std::uint8_t>& bytes);
std::string fnv64_hex_of_file(const std::string& path);

} // namespace kb
