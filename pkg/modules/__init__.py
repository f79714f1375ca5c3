__all__ = ['spatial', 'temporal', 'sfpc', 'selection', 'simulation', 'bootstrap',
           'parallel', 'logger', 'exceptions']
