// Binary scalar-field snapshots.
//
// Layout (little-endian, 32-byte header then payload):
//   bytes  0..3   magic "KSF1"
//   bytes  4..7   uint32  n        cells per axis
//   bytes  8..15  float64 L        half-width of the domain
//   bytes 16..23  float64 time     simulation time of the snapshot
//   bytes 24..31  zero            reserved
//   bytes 32..    n*n float64, row-major: value(i, j) at offset j*n + i,
//                 i the x index, j the y index.
#pragma once

#include "ksfluid/grid.hpp"

#include <string>

namespace ksfluid {

void write_snapshot(const std::string& path, const ScalarField& f, double time);

struct Snapshot {
    ScalarField field;
    double time = 0.0;
};

// Throws std::runtime_error on missing file, bad magic, or truncated payload.
Snapshot read_snapshot(const std::string& path);

}  // namespace ksfluid
