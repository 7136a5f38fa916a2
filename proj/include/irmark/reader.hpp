/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "reader/binarize.hpp"
#include "reader/detector.hpp"
#include "reader/read_sheet.hpp"
