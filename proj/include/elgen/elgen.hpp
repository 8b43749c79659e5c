#pragma once

// Umbrella header: exact bounded elementary factorization over Z, Z/q and
// M_n(Z), Kazhdan-constant budget arithmetic, and the Schreier gap probe.

#include "elgen/budget.hpp"
#include "elgen/decompose.hpp"
#include "elgen/elwords.hpp"
#include "elgen/errors.hpp"
#include "elgen/integers.hpp"
#include "elgen/matrix.hpp"
#include "elgen/normal_form.hpp"
#include "elgen/ring.hpp"
#include "elgen/spectral.hpp"
#include "elgen/unimodular.hpp"
