#pragma once

#include "qamp/amplify.hpp"
#include "qamp/circuit.hpp"
#include "qamp/coloring.hpp"
#include "qamp/corpus.hpp"
#include "qamp/expander.hpp"
#include "qamp/hamiltonian.hpp"
#include "qamp/io.hpp"
#include "qamp/ledger.hpp"
#include "qamp/local_ops.hpp"
#include "qamp/measure.hpp"
#include "qamp/parallel.hpp"
#include "qamp/projector.hpp"
#include "qamp/random.hpp"
#include "qamp/spectra.hpp"
#include "qamp/types.hpp"
#include "qamp/verify.hpp"
