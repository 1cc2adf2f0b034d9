/*
 * Copyright 2026 The SoftRankGBM Authors
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef SRGBM_MODEL_IO_H_
#define SRGBM_MODEL_IO_H_

#include <iosfwd>
#include <string>

#include "srgbm/gbm.h"

namespace srgbm {

// Self-describing text model format: a versioned header echoing the training
// configuration, then one node list per tree. All reals are written with 17
// significant digits, so load(save(m)) predicts bit-identically to m.
// Runtime-only knobs (threads, evaluation cadence) are not part of a model.
void save_model(const TreeEnsemble& model, std::ostream& out);
void save_model_file(const TreeEnsemble& model, const std::string& path);

// Throws IoError on malformed content (with the offending line) or an
// unsupported version.
TreeEnsemble load_model(std::istream& in);
TreeEnsemble load_model_file(const std::string& path);

}  // namespace srgbm

#endif  // SRGBM_MODEL_IO_H_
