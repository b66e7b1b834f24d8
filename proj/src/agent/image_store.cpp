#include "agent/image_store.hpp"

#include "common/error.hpp"
#include "common/files.hpp"

namespace photoart {

std::string ImageStore::put(const Image& image) {
  auto digest = image_digest(image);
  if (!contains(digest)) put_png(digest, encode_png(image));
  return digest;
}

Image ImageStore::get(const std::string& digest) const { return decode_image(get_png(digest)); }

std::vector<std::uint8_t> MemoryImageStore::get_png(const std::string& digest) const {
  std::lock_guard lock(mutex_);
  auto it = images_.find(digest);
  if (it == images_.end()) fail(ErrorCode::kNotFound, "no stored image " + digest);
  return it->second;
}

bool MemoryImageStore::contains(const std::string& digest) const {
  std::lock_guard lock(mutex_);
  return images_.count(digest) != 0;
}

void MemoryImageStore::put_png(const std::string& digest, std::vector<std::uint8_t> png) {
  std::lock_guard lock(mutex_);
  images_.emplace(digest, std::move(png));
}

DirectoryImageStore::DirectoryImageStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + dir_.string() + ": " + ec.message());
}

std::filesystem::path DirectoryImageStore::path_for(const std::string& digest) const {
  if (digest.size() != 64 || digest.find_first_not_of("0123456789abcdef") != std::string::npos) {
    fail(ErrorCode::kNotFound, "malformed image digest");
  }
  return dir_ / (digest + ".png");
}

std::vector<std::uint8_t> DirectoryImageStore::get_png(const std::string& digest) const {
  const auto path = path_for(digest);
  if (!std::filesystem::exists(path)) fail(ErrorCode::kNotFound, "no stored image " + digest);
  return read_file_bytes(path);
}

bool DirectoryImageStore::contains(const std::string& digest) const {
  return std::filesystem::exists(path_for(digest));
}

void DirectoryImageStore::put_png(const std::string& digest, std::vector<std::uint8_t> png) {
  write_file_atomic(path_for(digest), png);
}

}  // namespace photoart
