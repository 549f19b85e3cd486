"""Raw IEEE 118-bus test case tables (transcribed from the public PSTCA/MATPOWER
distribution of the case, 100 MVA base).

Only the columns needed for the DC swing model are kept: bus loads, machine
dispatch, branch reactances and the transformer flags.  See
docs/ieee118_transcription.md for how these tables are mapped onto the JSON
case format.
"""

# (bus, Pd [MW]) -- buses not listed carry no load.
BUS_LOAD_MW = {
    1: 51.0, 2: 20.0, 3: 39.0, 4: 39.0, 6: 52.0, 7: 19.0, 8: 28.0,
    11: 70.0, 12: 47.0, 13: 34.0, 14: 14.0, 15: 90.0, 16: 25.0, 17: 11.0,
    18: 60.0, 19: 45.0, 20: 18.0, 21: 14.0, 22: 10.0, 23: 7.0, 24: 13.0,
    27: 71.0, 28: 17.0, 29: 24.0, 31: 43.0, 32: 59.0, 33: 23.0, 34: 59.0,
    35: 33.0, 36: 31.0, 39: 27.0, 40: 66.0, 41: 37.0, 42: 96.0, 43: 18.0,
    44: 16.0, 45: 53.0, 46: 28.0, 47: 34.0, 48: 20.0, 49: 87.0, 50: 17.0,
    51: 17.0, 52: 18.0, 53: 23.0, 54: 113.0, 55: 63.0, 56: 84.0, 57: 12.0,
    58: 12.0, 59: 277.0, 60: 78.0, 62: 77.0, 66: 39.0, 67: 28.0, 70: 66.0,
    72: 12.0, 73: 6.0, 74: 68.0, 75: 47.0, 76: 68.0, 77: 61.0, 78: 71.0,
    79: 39.0, 80: 130.0, 82: 54.0, 83: 20.0, 84: 11.0, 85: 24.0, 86: 21.0,
    88: 48.0, 90: 163.0, 91: 10.0, 92: 65.0, 93: 12.0, 94: 30.0, 95: 42.0,
    96: 38.0, 97: 15.0, 98: 34.0, 99: 42.0, 100: 37.0, 101: 22.0, 102: 5.0,
    103: 23.0, 104: 38.0, 105: 31.0, 106: 43.0, 107: 50.0, 108: 2.0,
    109: 8.0, 110: 39.0, 112: 68.0, 113: 6.0, 114: 8.0, 115: 22.0,
    116: 184.0, 117: 20.0, 118: 33.0,
}

# (bus, Pg [MW]) for the 54 synchronous machines; condensers dispatch 0 MW but
# still carry inertia.  Bus 69 is the original slack.
MACHINE_DISPATCH_MW = {
    1: 0.0, 4: 0.0, 6: 0.0, 8: 0.0, 10: 450.0, 12: 85.0, 15: 0.0, 18: 0.0,
    19: 0.0, 24: 0.0, 25: 220.0, 26: 314.0, 27: 0.0, 31: 7.0, 32: 0.0,
    34: 0.0, 36: 0.0, 40: 0.0, 42: 0.0, 46: 19.0, 49: 204.0, 54: 48.0,
    55: 0.0, 56: 0.0, 59: 155.0, 61: 160.0, 62: 0.0, 65: 391.0, 66: 392.0,
    69: 516.4, 70: 0.0, 72: 0.0, 73: 0.0, 74: 0.0, 76: 0.0, 77: 0.0,
    80: 477.0, 85: 0.0, 87: 4.0, 89: 607.0, 90: 0.0, 91: 0.0, 92: 0.0,
    99: 0.0, 100: 252.0, 103: 40.0, 104: 0.0, 105: 0.0, 107: 0.0, 110: 0.0,
    111: 36.0, 112: 0.0, 113: 0.0, 116: 0.0,
}

# (from, to, x [p.u.], is_transformer) for all 186 branches.  Resistances and
# charging are dropped by the DC model; taps only mark transformer branches.
BRANCHES = [
    (1, 2, 0.0999, False),
    (1, 3, 0.0424, False),
    (4, 5, 0.00798, False),
    (3, 5, 0.108, False),
    (5, 6, 0.054, False),
    (6, 7, 0.0208, False),
    (8, 9, 0.0305, False),
    (8, 5, 0.0267, True),
    (9, 10, 0.0322, False),
    (4, 11, 0.0688, False),
    (5, 11, 0.0682, False),
    (11, 12, 0.0196, False),
    (2, 12, 0.0616, False),
    (3, 12, 0.16, False),
    (7, 12, 0.034, False),
    (11, 13, 0.0731, False),
    (12, 14, 0.0707, False),
    (13, 15, 0.2444, False),
    (14, 15, 0.195, False),
    (12, 16, 0.0834, False),
    (15, 17, 0.0437, False),
    (16, 17, 0.1801, False),
    (17, 18, 0.0505, False),
    (18, 19, 0.0493, False),
    (19, 20, 0.117, False),
    (15, 19, 0.0394, False),
    (20, 21, 0.0849, False),
    (21, 22, 0.097, False),
    (22, 23, 0.159, False),
    (23, 24, 0.0492, False),
    (23, 25, 0.08, False),
    (26, 25, 0.0382, True),
    (25, 27, 0.163, False),
    (27, 28, 0.0855, False),
    (28, 29, 0.0943, False),
    (30, 17, 0.0388, True),
    (8, 30, 0.0504, False),
    (26, 30, 0.086, False),
    (17, 31, 0.1563, False),
    (29, 31, 0.0331, False),
    (23, 32, 0.1153, False),
    (31, 32, 0.0985, False),
    (27, 32, 0.0755, False),
    (15, 33, 0.1244, False),
    (19, 34, 0.247, False),
    (35, 36, 0.0102, False),
    (35, 37, 0.0497, False),
    (33, 37, 0.142, False),
    (34, 36, 0.0268, False),
    (34, 37, 0.0094, False),
    (38, 37, 0.0375, True),
    (37, 39, 0.106, False),
    (37, 40, 0.168, False),
    (30, 38, 0.054, False),
    (39, 40, 0.0605, False),
    (40, 41, 0.0487, False),
    (40, 42, 0.183, False),
    (41, 42, 0.135, False),
    (43, 44, 0.2454, False),
    (34, 43, 0.1681, False),
    (44, 45, 0.0901, False),
    (45, 46, 0.1356, False),
    (46, 47, 0.127, False),
    (46, 48, 0.189, False),
    (47, 49, 0.0625, False),
    (42, 49, 0.323, False),
    (42, 49, 0.323, False),
    (45, 49, 0.186, False),
    (48, 49, 0.0505, False),
    (49, 50, 0.0752, False),
    (49, 51, 0.137, False),
    (51, 52, 0.0588, False),
    (52, 53, 0.1635, False),
    (53, 54, 0.122, False),
    (49, 54, 0.289, False),
    (49, 54, 0.291, False),
    (54, 55, 0.0707, False),
    (54, 56, 0.00955, False),
    (55, 56, 0.0151, False),
    (56, 57, 0.0966, False),
    (50, 57, 0.134, False),
    (56, 58, 0.0966, False),
    (51, 58, 0.0719, False),
    (54, 59, 0.2293, False),
    (56, 59, 0.251, False),
    (56, 59, 0.239, False),
    (55, 59, 0.2158, False),
    (59, 60, 0.145, False),
    (59, 61, 0.15, False),
    (60, 61, 0.0135, False),
    (60, 62, 0.0561, False),
    (61, 62, 0.0376, False),
    (63, 59, 0.0386, True),
    (63, 64, 0.02, False),
    (64, 61, 0.0268, True),
    (38, 65, 0.0986, False),
    (64, 65, 0.0302, False),
    (49, 66, 0.0919, False),
    (49, 66, 0.0919, False),
    (62, 66, 0.218, False),
    (62, 67, 0.117, False),
    (65, 66, 0.037, True),
    (66, 67, 0.1015, False),
    (65, 68, 0.016, False),
    (47, 69, 0.2778, False),
    (49, 69, 0.324, False),
    (68, 69, 0.037, True),
    (69, 70, 0.127, False),
    (24, 70, 0.4115, False),
    (70, 71, 0.0355, False),
    (24, 72, 0.196, False),
    (71, 72, 0.18, False),
    (71, 73, 0.0454, False),
    (70, 74, 0.1323, False),
    (70, 75, 0.141, False),
    (69, 75, 0.122, False),
    (74, 75, 0.0406, False),
    (76, 77, 0.148, False),
    (69, 77, 0.101, False),
    (75, 77, 0.1999, False),
    (77, 78, 0.0124, False),
    (78, 79, 0.0244, False),
    (77, 80, 0.0485, False),
    (77, 80, 0.105, False),
    (79, 80, 0.0704, False),
    (68, 81, 0.0202, False),
    (81, 80, 0.037, True),
    (77, 82, 0.0853, False),
    (82, 83, 0.03665, False),
    (83, 84, 0.132, False),
    (83, 85, 0.148, False),
    (84, 85, 0.0641, False),
    (85, 86, 0.123, False),
    (86, 87, 0.2074, False),
    (85, 88, 0.102, False),
    (85, 89, 0.173, False),
    (88, 89, 0.0712, False),
    (89, 90, 0.188, False),
    (89, 90, 0.0997, False),
    (90, 91, 0.0836, False),
    (89, 92, 0.0505, False),
    (89, 92, 0.1581, False),
    (91, 92, 0.1272, False),
    (92, 93, 0.0848, False),
    (92, 94, 0.158, False),
    (93, 94, 0.0732, False),
    (94, 95, 0.0434, False),
    (80, 96, 0.182, False),
    (82, 96, 0.053, False),
    (94, 96, 0.0869, False),
    (80, 97, 0.0934, False),
    (80, 98, 0.108, False),
    (80, 99, 0.206, False),
    (92, 100, 0.295, False),
    (94, 100, 0.058, False),
    (95, 96, 0.0547, False),
    (96, 97, 0.0885, False),
    (98, 100, 0.179, False),
    (99, 100, 0.0813, False),
    (100, 101, 0.1262, False),
    (92, 102, 0.0559, False),
    (101, 102, 0.112, False),
    (100, 103, 0.0525, False),
    (100, 104, 0.204, False),
    (103, 104, 0.1584, False),
    (103, 105, 0.1625, False),
    (100, 106, 0.229, False),
    (104, 105, 0.0378, False),
    (105, 106, 0.0547, False),
    (105, 107, 0.183, False),
    (105, 108, 0.0703, False),
    (106, 107, 0.183, False),
    (108, 109, 0.0288, False),
    (103, 110, 0.1813, False),
    (109, 110, 0.0762, False),
    (110, 111, 0.0755, False),
    (110, 112, 0.064, False),
    (17, 113, 0.0301, False),
    (32, 113, 0.203, False),
    (32, 114, 0.0612, False),
    (27, 115, 0.0741, False),
    (114, 115, 0.0104, False),
    (68, 116, 0.00405, False),
    (12, 117, 0.14, False),
    (75, 118, 0.0481, False),
    (76, 118, 0.0544, False),
]
