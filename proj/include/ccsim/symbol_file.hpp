#pragma once

#include <string>

#include "ccsim/channel.hpp"
#include "ccsim/mapping.hpp"

// Binary exchange formats. Both files are little-endian with a short
// self-describing header followed by interleaved float64 quadruples
// (re_x, im_x, re_y, im_y), one per symbol or sample.

namespace ccsim::io {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Symbol file: magic "CCSYMB", u16 version, u64 symbol count, u32 block
// length n, u8 pairing, u8 interleaved, u32 fec_block_len, u64 seed.
void write_symbol_file(const std::string& path, const mapping::QamFrame& frame);
mapping::QamFrame read_symbol_file(const std::string& path);

// Field file: magic "CCFLDF", u16 version, u64 sample count, f64 sample rate
// in Hz, f64 center offset in Hz.
void write_field_file(const std::string& path, const channel::OpticalField& field);
channel::OpticalField read_field_file(const std::string& path);

}  // namespace ccsim::io
