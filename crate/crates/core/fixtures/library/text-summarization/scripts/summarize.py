print('summary')
