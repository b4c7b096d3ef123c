#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pachinko/types.hpp"

namespace pachinko::testing {

// Deterministic GSR fixture reproducing the study's published per-city and
// per-month margins simultaneously:
//   city:  Adelaide 206/12, Brisbane 209/37, Canberra 206/27, Darwin 208/5,
//          Hobart 207/11, Melbourne 209/57, Perth 209/30, Sydney 209/47
//   month: Jul 79/14, Aug 248/41, Sep 240/41, Oct 248/40, Nov 240/47,
//          Dec 248/20, Jan 248/18, Feb 112/5
// Window 2017-07-21 .. 2018-02-14; the nine missing day-rows are the leading
// July days of the short cities. Events are distributed per month to the
// city with the largest remaining need, then placed on the earliest days of
// each (city, month) cell.
std::vector<GsrRecord> table2_gsr();

// Self-deleting scratch directory for tests that touch the filesystem.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace pachinko::testing
