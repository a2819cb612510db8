#pragma once

#include <spinweave/analysis.hpp>
#include <spinweave/chain.hpp>
#include <spinweave/disorder.hpp>
#include <spinweave/io.hpp>
#include <spinweave/manifest.hpp>
#include <spinweave/optimize.hpp>
#include <spinweave/rng.hpp>
#include <spinweave/spectral.hpp>
#include <spinweave/transfer.hpp>
#include <spinweave/version.hpp>
