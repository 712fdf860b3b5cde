#pragma once

#include <gepsoc/version.hpp>
#include <gepsoc/rational.hpp>
#include <gepsoc/poly_fn.hpp>
#include <gepsoc/cone.hpp>
#include <gepsoc/polyhedron.hpp>
#include <gepsoc/cone_union.hpp>
#include <gepsoc/gph_geometry.hpp>
#include <gepsoc/gamma_system.hpp>
#include <gepsoc/omega_geometry.hpp>
#include <gepsoc/optimality.hpp>
#include <gepsoc/oracles.hpp>
#include <gepsoc/validation.hpp>
#include <gepsoc/io.hpp>
