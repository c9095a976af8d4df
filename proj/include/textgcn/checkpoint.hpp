#pragma once

#include <filesystem>
#include <iosfwd>
#include <variant>

#include "textgcn/baseline.hpp"
#include "textgcn/gcn.hpp"

namespace textgcn {

struct GcnCheckpoint {
  GcnModel model;
  Hyperparams hp;
  bool normalize_features = false;
};

struct LogRegCheckpoint {
  LogRegModel model;
  LogRegParams params;
  bool normalize_features = false;
};

using Checkpoint = std::variant<GcnCheckpoint, LogRegCheckpoint>;

// Text container, one key per line, values at 17 significant digits:
//
//   textgcn-checkpoint 1
//   type gcn                    | type logreg
//   normalize_features 0|1
//   seed <u64>                  | (absent)
//   lr <real>
//   epochs <int>
//   hidden <int>                | l2 <real>
//   weight_decay <real>         | (absent)
//   matrix theta1 <rows> <cols> | matrix w <rows> <cols>
//   <rows lines of tab-separated values>
//   matrix theta2 <rows> <cols> | matrix b 1 <cols>
//   <rows lines>
//   end
void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint parse_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace textgcn
