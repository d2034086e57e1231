#ifndef MPIS_ARCHIVE_HPP
#define MPIS_ARCHIVE_HPP

#include <string>

#include "mpis/plane.hpp"

namespace mpis {

/// MPI archive: a directory holding manifest.json, per-plane 16-bit color
/// PNGs and raw little-endian float32 density maps.
void writeMpiArchive(const std::string& dir, const PlaneStack& stack,
                     const std::string& depthNormalization = "per_frame_minmax");

/// Throws CorruptArchive on missing/ill-formed manifest or plane files.
PlaneStack readMpiArchive(const std::string& dir);

}  // namespace mpis

#endif
