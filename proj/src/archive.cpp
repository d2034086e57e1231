#include "mpis/archive.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "mpis/image_io.hpp"

namespace fs = std::filesystem;

namespace mpis {

namespace {

std::string planeName(int k, const char* kind, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "plane_%02d_%s.%s", k, kind, ext);
  return buf;
}

}  // namespace

void writeMpiArchive(const std::string& dir, const PlaneStack& stack,
                     const std::string& depthNormalization) {
  validateStack(stack);
  fs::create_directories(dir);
  nlohmann::json manifest;
  manifest["version"] = 1;
  manifest["height"] = stack.height();
  manifest["width"] = stack.width();
  manifest["n_planes"] = stack.spec.nPlanes;
  manifest["disparities"] = stack.spec.disparities;
  manifest["density_mode"] = stack.densityMode == DensityMode::DirectAlpha
                                 ? "direct_alpha"
                                 : "raw_sigma";
  manifest["depth_normalization"] = depthNormalization;
  nlohmann::json planes = nlohmann::json::array();
  for (int k = 0; k < stack.spec.nPlanes; ++k) {
    std::string colorFile = planeName(k, "color", "png");
    std::string densityFile = planeName(k, "density", "raw");
    writeImage((fs::path(dir) / colorFile).string(), stack.planes[k].color, 16);
    std::ofstream out(fs::path(dir) / densityFile, std::ios::binary);
    out.write(
        reinterpret_cast<const char*>(stack.planes[k].density.data.data()),
        static_cast<std::streamsize>(stack.planes[k].density.data.size() *
                                     sizeof(float)));
    if (!out) throw Error(ErrorKind::IoError, "failed writing " + densityFile);
    planes.push_back({{"color", colorFile}, {"density", densityFile}});
  }
  manifest["planes"] = planes;
  std::ofstream mf(fs::path(dir) / "manifest.json");
  mf << manifest.dump(2) << "\n";
  if (!mf) throw Error(ErrorKind::IoError, "failed writing manifest.json");
}

PlaneStack readMpiArchive(const std::string& dir) {
  fs::path manifestPath = fs::path(dir) / "manifest.json";
  std::ifstream mf(manifestPath);
  if (!mf)
    throw Error(ErrorKind::CorruptArchive, "missing manifest.json in " + dir);
  nlohmann::json manifest;
  try {
    mf >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptArchive, e.what());
  }
  for (const char* field : {"height", "width", "n_planes", "disparities",
                            "density_mode", "planes"})
    if (!manifest.contains(field))
      throw Error(ErrorKind::CorruptArchive,
                  std::string("manifest missing field ") + field);

  PlaneStack stack;
  int h = manifest["height"].get<int>();
  int w = manifest["width"].get<int>();
  stack.spec.nPlanes = manifest["n_planes"].get<int>();
  stack.spec.disparities = manifest["disparities"].get<std::vector<double>>();
  if (static_cast<int>(stack.spec.disparities.size()) != stack.spec.nPlanes ||
      stack.spec.nPlanes < 2)
    throw Error(ErrorKind::CorruptArchive, "plane count mismatch in manifest");
  for (int n = 0; n + 1 < stack.spec.nPlanes; ++n)
    if (!(stack.spec.disparities[n] > stack.spec.disparities[n + 1]))
      throw Error(ErrorKind::CorruptArchive,
                  "disparities are not strictly decreasing");
  stack.spec.deltas.resize(stack.spec.nPlanes);
  for (int n = 0; n + 1 < stack.spec.nPlanes; ++n)
    stack.spec.deltas[n] =
        stack.spec.disparities[n] - stack.spec.disparities[n + 1];
  stack.spec.deltas.back() = stack.spec.deltas[stack.spec.nPlanes - 2];

  std::string mode = manifest["density_mode"].get<std::string>();
  if (mode == "direct_alpha") stack.densityMode = DensityMode::DirectAlpha;
  else if (mode == "raw_sigma") stack.densityMode = DensityMode::RawSigma;
  else throw Error(ErrorKind::CorruptArchive, "unknown density_mode " + mode);

  const auto& planes = manifest["planes"];
  if (static_cast<int>(planes.size()) != stack.spec.nPlanes)
    throw Error(ErrorKind::CorruptArchive,
                "stored plane count does not match manifest");
  stack.planes.resize(stack.spec.nPlanes);
  for (int k = 0; k < stack.spec.nPlanes; ++k) {
    fs::path colorPath = fs::path(dir) / planes[k]["color"].get<std::string>();
    fs::path densityPath =
        fs::path(dir) / planes[k]["density"].get<std::string>();
    if (!fs::exists(colorPath) || !fs::exists(densityPath))
      throw Error(ErrorKind::CorruptArchive,
                  "missing plane file for plane " + std::to_string(k));
    ImageBuffer color;
    try {
      color = readImage(colorPath.string());
    } catch (const Error& e) {
      throw Error(ErrorKind::CorruptArchive, e.what());
    }
    if (color.height != h || color.width != w || color.channels != 3)
      throw Error(ErrorKind::CorruptArchive,
                  "plane color shape mismatch for plane " + std::to_string(k));
    ImageBuffer density(h, w, 1);
    std::ifstream df(densityPath, std::ios::binary);
    df.read(reinterpret_cast<char*>(density.data.data()),
            static_cast<std::streamsize>(density.data.size() * sizeof(float)));
    if (df.gcount() !=
        static_cast<std::streamsize>(density.data.size() * sizeof(float)))
      throw Error(ErrorKind::CorruptArchive,
                  "density file truncated for plane " + std::to_string(k));
    stack.planes[k].color = std::move(color);
    stack.planes[k].density = std::move(density);
  }
  try {
    validateStack(stack);
  } catch (const Error& e) {
    throw Error(ErrorKind::CorruptArchive, e.what());
  }
  return stack;
}

}  // namespace mpis
