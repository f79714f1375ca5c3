# -*- coding: utf-8 -*-

from .resample import BootstrapConfig, BootstrapResult, bootstrap_sd, bootstrap_replicate

__all__ = ['BootstrapConfig', 'BootstrapResult', 'bootstrap_sd', 'bootstrap_replicate']
