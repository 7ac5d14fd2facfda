#include "gaitkit/store/store.hpp"

#include <dirent.h>
#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

namespace gaitkit::store {

namespace {

using formats::CanonicalKind;

[[noreturn]] void io_failure(const std::string& what, const std::error_code& ec) {
  throw Error(ErrorCode::IoFailure, what + ": " + ec.message());
}

[[noreturn]] void io_failure(const std::string& what) {
  throw Error(ErrorCode::IoFailure, what + ": " + std::strerror(errno));
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_failure("cannot create " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) io_failure("cannot write " + path.string());
}

bool is_iso_date(const std::string& s) {
  static const std::regex pattern(R"(\d{4}-(0[1-9]|1[0-2])-(0[1-9]|[12]\d|3[01]))");
  return std::regex_match(s, pattern);
}

/// Exclusive advisory lock held for the lifetime of the object.
class TrialLock {
 public:
  explicit TrialLock(const fs::path& path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) io_failure("cannot open lock " + path.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      io_failure("cannot lock " + path.string());
    }
  }
  ~TrialLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  TrialLock(const TrialLock&) = delete;
  TrialLock& operator=(const TrialLock&) = delete;

 private:
  int fd_ = -1;
};

/// Removes a staging directory unless released.
class StagingDir {
 public:
  explicit StagingDir(fs::path p) : path_(std::move(p)) {}
  ~StagingDir() {
    if (!path_.empty()) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
  }
  StagingDir(const StagingDir&) = delete;
  StagingDir& operator=(const StagingDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string staging_name(const std::string& trial) {
  static std::atomic<unsigned> counter{0};
  return "." + trial + ".staging-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
}

// Atomically puts `staged` at `target`, leaving the previous trial (if any) at `staged`.
void swap_in(const fs::path& staged, const fs::path& target) {
  if (::rename(staged.c_str(), target.c_str()) == 0) return;
  if (errno != EEXIST && errno != ENOTEMPTY) io_failure("cannot move trial into place");
  if (::renameat2(AT_FDCWD, staged.c_str(), AT_FDCWD, target.c_str(), RENAME_EXCHANGE) == 0) return;
  if (errno != EINVAL && errno != ENOSYS) io_failure("cannot swap trial directory");
  // File systems without exchange support: move the old trial aside first.
  const fs::path aside = staged.string() + ".old";
  if (::rename(target.c_str(), aside.c_str()) != 0) io_failure("cannot move old trial aside");
  if (::rename(staged.c_str(), target.c_str()) != 0) {
    const int saved = errno;
    ::rename(aside.c_str(), target.c_str());
    errno = saved;
    io_failure("cannot move trial into place");
  }
  if (::rename(aside.c_str(), staged.c_str()) != 0) io_failure("cannot stage old trial for removal");
}

}  // namespace

TrialMeta TrialMeta::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptFile, std::string("meta.json: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::CorruptFile, "meta.json: top level must be an object");
  TrialMeta m;
  for (auto& [key, value] : doc.items()) {
    auto text_field = [&](std::optional<std::string>& slot) {
      if (!value.is_string()) throw Error(ErrorCode::CorruptFile, "meta.json: '" + key + "' must be a string");
      slot = value.get<std::string>();
    };
    if (key == "body_weight_n") {
      if (!value.is_number()) throw Error(ErrorCode::CorruptFile, "meta.json: 'body_weight_n' must be a number");
      m.body_weight_n = value.get<double>();
    } else if (key == "session_date") {
      text_field(m.session_date);
    } else if (key == "label") {
      text_field(m.label);
    } else if (key == "notes") {
      text_field(m.notes);
    } else {
      m.extra[key] = value;
    }
  }
  return m;
}

std::string TrialMeta::to_json() const {
  nlohmann::json doc = extra.is_object() ? extra : nlohmann::json::object();
  if (body_weight_n) doc["body_weight_n"] = *body_weight_n;
  if (session_date) doc["session_date"] = *session_date;
  if (label) doc["label"] = *label;
  if (notes) doc["notes"] = *notes;
  return doc.dump(2) + "\n";
}

const TimeSeriesTable* TrialBundle::table(CanonicalKind kind) const {
  auto it = files.find(kind);
  return it == files.end() ? nullptr : std::get_if<TimeSeriesTable>(&it->second);
}

const GaitEvents* TrialBundle::events() const {
  auto it = files.find(CanonicalKind::Events);
  return it == files.end() ? nullptr : std::get_if<GaitEvents>(&it->second);
}

const SpatiotemporalRow* TrialBundle::spatiotemporal() const {
  auto it = files.find(CanonicalKind::Spatiotemporal);
  return it == files.end() ? nullptr : std::get_if<SpatiotemporalRow>(&it->second);
}

fs::path trial_dir(const fs::path& root, const TrialRef& ref) {
  return root / ref.group / ref.patient_id / ref.trial_id;
}

void save_trial(const fs::path& root, const TrialBundle& bundle) {
  const TrialRef ref = TrialRef::make(bundle.ref.group, bundle.ref.patient_id, bundle.ref.trial_id);

  // Serialize everything before touching the disk.
  std::vector<std::pair<std::string, std::string>> contents;
  for (const auto& [kind, data] : bundle.files) {
    try {
      contents.emplace_back(formats::file_name(kind), formats::write_canonical_csv(data, kind));
    } catch (const Error& e) {
      throw Error(ErrorCode::ValidationFailed,
                  formats::file_name(kind) + ": " + std::string(code_name(e.code())) + ": " + e.what());
    }
  }
  const auto& meta = bundle.meta;
  if (meta.body_weight_n && !(*meta.body_weight_n > 0.0)) {
    throw Error(ErrorCode::ValidationFailed, "meta.json: body_weight_n must be positive");
  }
  if (meta.session_date && !is_iso_date(*meta.session_date)) {
    throw Error(ErrorCode::ValidationFailed,
                "meta.json: session_date '" + *meta.session_date + "' is not YYYY-MM-DD");
  }
  if (!meta.extra.is_object()) throw Error(ErrorCode::ValidationFailed, "meta.json: extra keys must form an object");
  contents.emplace_back(kMetaFile, meta.to_json());
  if (bundle.video && !fs::is_regular_file(*bundle.video)) {
    throw Error(ErrorCode::ValidationFailed, "video '" + bundle.video->string() + "' is not a readable file");
  }

  const fs::path patient = root / ref.group / ref.patient_id;
  std::error_code ec;
  fs::create_directories(patient, ec);
  if (ec) io_failure("cannot create " + patient.string(), ec);

  const TrialLock lock(patient / ("." + ref.trial_id + ".lock"));
  const StagingDir staging(patient / staging_name(ref.trial_id));
  fs::create_directory(staging.path(), ec);
  if (ec) io_failure("cannot create staging directory", ec);
  for (const auto& [name, text] : contents) write_file(staging.path() / name, text);
  if (bundle.video) {
    fs::copy_file(*bundle.video, staging.path() / kVideoFile, fs::copy_options::overwrite_existing, ec);
    if (ec) io_failure("cannot copy video", ec);
  }
  swap_in(staging.path(), patient / ref.trial_id);
}

namespace {

struct Fd {
  int fd = -1;
  explicit Fd(int f) : fd(f) {}
  ~Fd() {
    if (fd >= 0) ::close(fd);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
};

/// Signals that the directory being read was swapped out underneath us.
struct Retry {};

std::string read_at(int dirfd, const std::string& name) {
  const Fd f(::openat(dirfd, name.c_str(), O_RDONLY | O_CLOEXEC));
  if (f.fd < 0) {
    if (errno == ENOENT) throw Retry{};
    io_failure("cannot open " + name);
  }
  std::string out;
  char buf[65536];
  for (;;) {
    const ssize_t n = ::read(f.fd, buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_failure("cannot read " + name);
    }
    if (n == 0) break;
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

std::vector<std::string> list_at(int dirfd) {
  const int dup_fd = ::dup(dirfd);
  if (dup_fd < 0) io_failure("cannot duplicate directory handle");
  DIR* d = ::fdopendir(dup_fd);
  if (d == nullptr) {
    ::close(dup_fd);
    io_failure("cannot list trial directory");
  }
  std::vector<std::string> names;
  while (const dirent* e = ::readdir(d)) {
    const std::string name = e->d_name;
    if (name != "." && name != "..") names.push_back(name);
  }
  ::closedir(d);
  std::sort(names.begin(), names.end());
  return names;
}

TrialBundle load_pinned(const fs::path& dir, const TrialRef& ref, Warnings* warnings) {
  // Every file is read through one directory handle. Writers replace a trial
  // by swapping whole directories, so if the same directory is still in
  // place afterwards nothing was removed while we read it. The open handle
  // keeps the inode number from being reused.
  const Fd dirfd(::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC));
  if (dirfd.fd < 0) {
    if (errno == ENOENT || errno == ENOTDIR) throw Error(ErrorCode::NotFound, "trial " + ref.to_string() + " not found");
    io_failure("cannot open " + dir.string());
  }
  TrialBundle bundle;
  bundle.ref = ref;
  Warnings local;
  for (const auto& name : list_at(dirfd.fd)) {
    if (name.front() == '.') continue;
    if (name == kVideoFile) {
      bundle.video = dir / name;
      continue;
    }
    if (name == kMetaFile) {
      bundle.meta = TrialMeta::from_json(read_at(dirfd.fd, name));
      continue;
    }
    std::optional<CanonicalKind> kind;
    for (auto k : formats::kAllKinds) {
      if (formats::file_name(k) == name) kind = k;
    }
    if (!kind) {
      local.push_back(ref.to_string() + ": ignoring unrecognised file '" + name + "'");
      continue;
    }
    const std::string text = read_at(dirfd.fd, name);
    try {
      bundle.files.emplace(*kind, formats::read_canonical_csv(text, *kind));
    } catch (const Error& e) {
      throw Error(ErrorCode::CorruptFile, name + ": " + std::string(code_name(e.code())) + ": " + e.what());
    }
  }
  struct stat pinned {}, current {};
  if (::fstat(dirfd.fd, &pinned) != 0) io_failure("cannot stat trial directory");
  if (::stat(dir.c_str(), &current) != 0 || current.st_ino != pinned.st_ino || current.st_dev != pinned.st_dev) {
    throw Retry{};
  }
  for (auto& w : local) warn(warnings, std::move(w));
  return bundle;
}

}  // namespace

TrialBundle load_trial(const fs::path& root, const TrialRef& ref, Warnings* warnings) {
  const fs::path dir = trial_dir(root, ref);
  constexpr int kAttempts = 64;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    try {
      return load_pinned(dir, ref, warnings);
    } catch (const Retry&) {
      std::this_thread::yield();
    }
  }
  throw Error(ErrorCode::IoFailure, "trial " + ref.to_string() + " kept changing while being read");
}

Hierarchy list_hierarchy(const fs::path& root, Warnings* warnings) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::IoFailure, "data root '" + root.string() + "' is not a readable directory");
  }
  // Valid sub-directory names of `dir`, sorted; everything else reported.
  auto children = [&](const fs::path& dir) {
    std::vector<std::string> names;
    std::error_code iter_ec;
    for (const auto& entry : fs::directory_iterator(dir, iter_ec)) {
      const std::string name = entry.path().filename().string();
      if (name.empty() || name.front() == '.') continue;
      std::error_code type_ec;
      if (!entry.is_directory(type_ec)) {
        warn(warnings, "ignoring stray file '" + (dir / name).string() + "'");
      } else if (!is_valid_component(name)) {
        warn(warnings, "ignoring directory '" + (dir / name).string() + "': name breaks [a-z0-9][a-z0-9_-]*");
      } else {
        names.push_back(name);
      }
    }
    if (iter_ec) io_failure("cannot list " + dir.string(), iter_ec);
    std::sort(names.begin(), names.end());
    return names;
  };
  Hierarchy tree;
  for (const auto& group : children(root)) {
    auto& patients = tree[group];
    for (const auto& patient : children(root / group)) {
      patients[patient] = children(root / group / patient);
    }
  }
  return tree;
}

std::optional<TrialStamp> trial_stamp(const fs::path& root, const TrialRef& ref) {
  struct stat st {};
  if (::stat(trial_dir(root, ref).c_str(), &st) != 0 || !S_ISDIR(st.st_mode)) return std::nullopt;
  return TrialStamp{static_cast<std::uint64_t>(st.st_dev), static_cast<std::uint64_t>(st.st_ino),
                    static_cast<std::int64_t>(st.st_mtim.tv_sec) * 1000000000 + st.st_mtim.tv_nsec};
}

}  // namespace gaitkit::store
