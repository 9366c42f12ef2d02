// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

inline std::string fixture(const std::string& rel) { return std::string(SELFHELP_DATA_DIR) + "/" + rel; }
