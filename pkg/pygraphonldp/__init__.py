from .API import *
