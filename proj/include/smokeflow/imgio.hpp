#pragma once

#include <string>

#include "smokeflow/types.hpp"

namespace smokeflow::imgio {

/// Reads a PNG, PGM or PPM image (detected by content magic) into [0,1]
/// intensities: 8-bit samples divide by 255, 16-bit by 65535. Grayscale
/// stays 1-channel, color becomes 3-channel.
/// Throws MissingFile, UnsupportedFormat or CorruptHeader naming the path.
ImageFrame read_image(const std::string& path);

/// Writes a frame as 8-bit PNG/PGM/PPM chosen by file extension. Writes are
/// atomic: a temp file in the same directory is renamed over the target.
/// Round trip is exact up to the 1/255 quantization.
void write_image(const ImageFrame& frame, const std::string& path);

/// Middlebury .flo interchange: 4-byte float magic 202021.25, two int32
/// dims, then row-major interleaved (u,v) IEEE-754 single precision, all
/// little-endian. The magic must match bit-exactly on read.
FlowField read_flo(const std::string& path);
void write_flo(const FlowField& flow, const std::string& path);

/// Masks serialize as 8-bit grayscale PNG with values {0,255}.
void write_mask(const Mask& mask, const std::string& path);
Mask read_mask(const std::string& path);

/// Quantizes to the exact values an 8-bit round trip would produce
/// (round(v*255)/255 after clamping). Downstream stages that must be
/// byte-reproducible against file-based runs operate on quantized frames.
ImageFrame quantize8(const ImageFrame& frame);

/// Same idea for flow: pass every sample through IEEE single precision,
/// matching a .flo write/read round trip.
FlowField quantize_flow(const FlowField& flow);

}  // namespace smokeflow::imgio
