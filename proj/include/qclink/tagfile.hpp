#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qclink/photonics.hpp"

namespace qclink {

// QTT1 time-tag file, little-endian throughout.
//
//   offset  size  field
//        0     4  magic "QTT1"
//        4     2  format version (1)
//        6     2  channel count
//        8     8  sample epoch, ps (0 when unused)
//       16     8  record count
//       24   16n  records
//
// Record: channel u16, reserved u16 (0), flags u32 (0), timestamp u64 ps.
// Records are sorted non-decreasing in timestamp per channel.

inline constexpr char kTagFileMagic[4] = {'Q', 'T', 'T', '1'};
inline constexpr uint16_t kTagFileVersion = 1;
inline constexpr size_t kTagFileHeaderSize = 24;
inline constexpr size_t kTagRecordSize = 16;

struct TagFileHeader {
  uint16_t version = kTagFileVersion;
  uint16_t channel_count = 1;
  uint64_t epoch_ps = 0;
  uint64_t record_count = 0;
};

std::vector<uint8_t> encode_tag_file(const std::vector<TimeTag>& tags,
                                     uint16_t channel_count, uint64_t epoch_ps = 0);

/// Decodes and validates a QTT1 buffer. Throws DataError with the byte
/// offset of the first offending field (magic errors name byte 0, record
/// errors name the record's offset).
std::vector<TimeTag> decode_tag_file(const std::vector<uint8_t>& bytes,
                                     TagFileHeader* header_out = nullptr);

/// Atomic write (temp file + rename).
void write_tag_file(const std::string& path, const std::vector<TimeTag>& tags,
                    uint16_t channel_count, uint64_t epoch_ps = 0);

std::vector<TimeTag> read_tag_file(const std::string& path,
                                   TagFileHeader* header_out = nullptr);

}  // namespace qclink
