/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// QR symbols, versions 1..7, all four ECC levels.

#include "qr/decoder.hpp"
#include "qr/encoder.hpp"
#include "qr/gf256.hpp"
#include "qr/reed_solomon.hpp"
#include "qr/symbol.hpp"
#include "qr/tables.hpp"
