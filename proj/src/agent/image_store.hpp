#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "engine/image.hpp"

namespace photoart {

/// Content-addressed PNG store keyed by image_digest().
class ImageStore {
 public:
  virtual ~ImageStore() = default;

  std::string put(const Image& image);  // returns the digest
  Image get(const std::string& digest) const;
  virtual std::vector<std::uint8_t> get_png(const std::string& digest) const = 0;
  virtual bool contains(const std::string& digest) const = 0;

 protected:
  virtual void put_png(const std::string& digest, std::vector<std::uint8_t> png) = 0;
};

class MemoryImageStore : public ImageStore {
 public:
  std::vector<std::uint8_t> get_png(const std::string& digest) const override;
  bool contains(const std::string& digest) const override;

 protected:
  void put_png(const std::string& digest, std::vector<std::uint8_t> png) override;

 private:
  std::map<std::string, std::vector<std::uint8_t>> images_;
  mutable std::mutex mutex_;
};

// One <digest>.png per image under `dir`.
class DirectoryImageStore : public ImageStore {
 public:
  explicit DirectoryImageStore(std::filesystem::path dir);
  std::vector<std::uint8_t> get_png(const std::string& digest) const override;
  bool contains(const std::string& digest) const override;

 protected:
  void put_png(const std::string& digest, std::vector<std::uint8_t> png) override;

 private:
  std::filesystem::path path_for(const std::string& digest) const;
  std::filesystem::path dir_;
};

}  // namespace photoart
