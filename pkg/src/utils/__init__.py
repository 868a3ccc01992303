# Copyright 2024 The leafpowers Authors.
# See LICENSE file for licensing details.

"""Internal utilities used by the leafpowers command line."""
